fn main() {
    let status = curvlab::run(std::env::args_os());
    std::process::exit(status.code());
}
