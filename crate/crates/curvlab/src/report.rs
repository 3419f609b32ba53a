//! JSON report schemas. Every report carries `schema_version`; fields are
//! only ever added, and non-finite numbers are written as `null`.

use serde::Serialize;

use curvlab_core::norms::Trend;
use curvlab_core::radial::BoundaryAuditRow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct FamilyJson {
    pub name: &'static str,
    pub n: usize,
    pub i: f64,
    pub r0: f64,
    pub eps: Option<f64>,
    pub alpha: f64,
    pub side: f64,
    pub mode: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvatureSample {
    pub r: f64,
    pub scalar_curvature: f64,
}

/// Output of `curvlab example`.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub family: FamilyJson,
    /// `∫ R dvol` by adaptive quadrature.
    pub total: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Closed-form lower bound for large `i`, when the family has one.
    pub lower_bound: Option<f64>,
    /// Closed-form value of the total, when one exists.
    pub closed_form_total: Option<f64>,
    /// The same closed form assembled from the oscillatory moments.
    pub closed_form_from_moments: Option<f64>,
    pub notes: Vec<String>,
    pub samples: Vec<CurvatureSample>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrendJson {
    pub rate: f64,
    pub min: f64,
    pub verdict: &'static str,
}

impl From<&Trend> for TrendJson {
    fn from(t: &Trend) -> Self {
        Self { rate: t.rate, min: t.min, verdict: t.verdict.name() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendsJson {
    pub c0: TrendJson,
    pub c1: TrendJson,
    pub c2: TrendJson,
    pub w1p: Vec<(f64, TrendJson)>,
}

/// Summary written next to a sweep CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub command: &'static str,
    pub family: FamilyJson,
    pub indices: Vec<f64>,
    pub bound: Option<f64>,
    /// Smallest swept `i` from which every total stays above the bound.
    pub threshold_i0: Option<f64>,
    /// Present when the sweep has at least three points.
    pub trends: Option<TrendsJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentsJson {
    pub first_moment: f64,
    pub first_moment_printed: f64,
    pub ground_moment: f64,
    pub ground_moment_lower_bound: f64,
    pub ground_moment_bound_printed: f64,
    /// `∫_0^{r0} r^{n+1} e^{-2 i r²} dr` by recurrence.
    pub gaussian_moment: f64,
    pub gaussian_moment_quadrature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IjklJson {
    pub a: f64,
    pub b: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub l: f64,
    pub j_printed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsJson {
    pub c10: Option<f64>,
    pub c21: Option<f64>,
    pub integral_limit: Option<f64>,
    pub integral_lower_bound: Option<f64>,
    pub integral_bound_printed: Option<f64>,
    pub twodim_closed_form: f64,
    pub twodim_from_moments: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditRowJson {
    pub i: f64,
    pub boundary_term: f64,
    pub interior_energy: f64,
    pub total_with_boundary: f64,
    pub direct_total: f64,
    pub consistent: bool,
    pub boundary_vanishes: bool,
}

impl From<&BoundaryAuditRow> for AuditRowJson {
    fn from(r: &BoundaryAuditRow) -> Self {
        Self {
            i: r.i,
            boundary_term: r.boundary_term,
            interior_energy: r.interior_energy,
            total_with_boundary: r.total_with_boundary,
            direct_total: r.direct_total,
            consistent: r.consistent,
            boundary_vanishes: r.boundary_vanishes,
        }
    }
}

/// Output of `curvlab integrals`.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralsReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub n: usize,
    pub i: f64,
    pub r0: f64,
    pub moments: MomentsJson,
    pub ijkl: IjklJson,
    pub bounds: BoundsJson,
    pub boundary_audit: Vec<AuditRowJson>,
    pub notes: Vec<String>,
}
