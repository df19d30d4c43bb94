//! Parameter sets of the equivalent quasi-norms and their validity against
//! the hypotheses of the characterizations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, DomainSpec};
use crate::morrey::MorreyParams;

/// Serde adapter writing infinite values as the string `"inf"`.
pub mod inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other.parse().map_err(|_| serde::de::Error::custom(format!("not a number: {s}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceFamily {
    /// Outer Morrey norm `M^u_p`.
    BesovMorrey { u: f64 },
    /// Outer `sup_P |P|^{-τ} ||·||_{L_p(P)}`.
    BesovType { tau: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Local oscillations.
    Osc,
    /// Higher-order differences over `V^N`.
    Diff,
    /// Discrete dyadic-scale oscillation norm with unnormalized ball errors.
    Hn,
    /// Littlewood-Paley reference (full space only).
    Lp,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Osc => "osc",
            Flavor::Diff => "diff",
            Flavor::Hn => "hn",
            Flavor::Lp => "lp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "osc" => Ok(Flavor::Osc),
            "diff" => Ok(Flavor::Diff),
            "hn" => Ok(Flavor::Hn),
            "lp" => Ok(Flavor::Lp),
            _ => Err(Error::invalid(format!("unknown flavor {s:?}; expected osc, diff, hn or lp"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MainTerm {
    /// Outer norm of `f` itself.
    PlainMorrey,
    /// Outer norm of `x ↦ (∫_{B(x,R)∩Ω} |f|^v)^{1/v}` (no `R^{-d}` factor).
    VAveraged,
}

fn default_main_term() -> MainTerm {
    MainTerm::PlainMorrey
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub d: usize,
    pub s: f64,
    pub p: f64,
    #[serde(with = "inf")]
    pub q: f64,
    #[serde(with = "inf")]
    pub v: f64,
    pub family: SpaceFamily,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T", with = "inf")]
    pub t_max: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(default = "default_main_term")]
    pub main_term: MainTerm,
}

impl SpaceParams {
    /// Besov-Morrey parameters with `T = R = 1` and the plain main term.
    pub fn besov_morrey(d: usize, s: f64, p: f64, u: f64, q: f64, v: f64, n: usize) -> Self {
        SpaceParams {
            d,
            s,
            p,
            q,
            v,
            family: SpaceFamily::BesovMorrey { u },
            n,
            t_max: 1.0,
            r: 1.0,
            main_term: MainTerm::PlainMorrey,
        }
    }

    /// Besov-type parameters with `T = R = 1` and the plain main term.
    pub fn besov_type(d: usize, s: f64, p: f64, tau: f64, q: f64, v: f64, n: usize) -> Self {
        SpaceParams { family: SpaceFamily::BesovType { tau }, ..Self::besov_morrey(d, s, p, p, q, v, n) }
    }

    /// Outer Morrey parameters; Besov-type `τ` maps to `u = 1/(1/p - τ)`.
    pub fn morrey(&self) -> Result<MorreyParams> {
        match self.family {
            SpaceFamily::BesovMorrey { u } => MorreyParams::new(self.p, u),
            SpaceFamily::BesovType { tau } => MorreyParams::from_tau(self.p, tau),
        }
    }

    /// `σ_p = d · max{0, 1/p - 1}`.
    pub fn sigma_p(&self) -> f64 {
        self.d as f64 * (1.0 / self.p - 1.0).max(0.0)
    }

    /// Lower end `d · max{0, 1/p - 1, 1/p - 1/v}` of the smoothness window.
    pub fn smoothness_floor(&self) -> f64 {
        self.d as f64 * (0.0f64).max(1.0 / self.p - 1.0).max(1.0 / self.p - 1.0 / self.v)
    }

    /// `min{1, p, q}`.
    pub fn triangle_exponent(&self) -> f64 {
        1.0f64.min(self.p).min(self.q)
    }

    /// Hard range checks: violations make the norms undefined.
    pub fn check(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::invalid("d and N must be positive"));
        }
        for (name, v) in [("q", self.q), ("v", self.v), ("T", self.t_max)] {
            if !(v > 0.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, inf]")));
            }
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::invalid("R must lie in (0, inf)"));
        }
        if !self.s.is_finite() {
            return Err(Error::invalid("s must be finite"));
        }
        self.morrey().map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub satisfied: bool,
    pub message: String,
}

/// Hypotheses of the characterizations, each marked satisfied or violated.
/// Violations never block computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub sigma_p: f64,
    pub smoothness_floor: f64,
    pub clauses: Vec<Clause>,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.clauses.iter().all(|c| c.satisfied)
    }

    pub fn violations(&self) -> Vec<String> {
        self.clauses.iter().filter(|c| !c.satisfied).map(|c| c.message.clone()).collect()
    }
}

fn clause(name: &str, satisfied: bool, message: String) -> Clause {
    Clause { name: name.to_string(), satisfied, message }
}

/// Checks `sp` against the hypotheses that apply on `dom` for `flavor`.
pub fn validate(sp: &SpaceParams, dom: &DomainSpec, flavor: Flavor) -> Validity {
    let mut clauses = Vec::new();
    clauses.push(match sp.check() {
        Ok(()) => clause("ranges", true, "parameter ranges admissible".into()),
        Err(e) => clause("ranges", false, e.to_string()),
    });
    let floor = sp.smoothness_floor();
    let n = sp.n as f64;
    clauses.push(clause(
        "smoothness_window",
        floor < sp.s && sp.s < n,
        format!("smoothness window requires {floor} < s < {n}, got s = {}", sp.s),
    ));
    if dom.dim() != sp.d {
        clauses.push(clause("dimension", false, format!("domain has d = {} but parameters say d = {}", dom.dim(), sp.d)));
    }
    let on_domain = !dom.is_full_space();
    if on_domain {
        clauses.push(clause(
            "domain_v",
            sp.v >= 1.0,
            format!("domain characterization requires v >= 1, got v = {}", sp.v),
        ));
        if sp.main_term == MainTerm::PlainMorrey {
            clauses.push(clause(
                "domain_plain_main_term",
                sp.p >= 1.0,
                format!("plain main term on a domain requires p >= 1, got p = {}", sp.p),
            ));
        }
    }
    if flavor == Flavor::Lp {
        clauses.push(clause("lp_full_space", !on_domain, "Littlewood-Paley reference is defined on the full space only".into()));
    }
    if flavor == Flavor::Diff {
        if let DomainKind::BoundedConvex { .. } = dom.kind {
            let d = sp.d as f64;
            clauses.push(clause(
                "convex_differences",
                sp.p > 1.0 && sp.v.is_infinite() && d / sp.p < sp.s && sp.s < n,
                format!(
                    "differences on a bounded convex domain require p > 1, v = inf and {} < s < {n}; got p = {}, v = {}, s = {}",
                    d / sp.p,
                    sp.p,
                    sp.v,
                    sp.s
                ),
            ));
        }
    }
    Validity { sigma_p: sp.sigma_p(), smoothness_floor: floor, clauses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;

    fn full(d: usize) -> DomainSpec {
        DomainSpec::full_space(BoxRegion::cube(d, -1.0, 1.0))
    }

    #[test]
    fn window_arithmetic() {
        let sp = SpaceParams::besov_morrey(1, 0.7, 1.5, 3.0, 2.0, 2.0, 2);
        assert!((sp.smoothness_floor() - 1.0 / 6.0).abs() < 1e-15);
        assert!(validate(&sp, &full(1), Flavor::Osc).is_valid());
        let at_n = SpaceParams { s: 2.0, ..sp.clone() };
        assert!(!validate(&at_n, &full(1), Flavor::Osc).is_valid());
    }

    #[test]
    fn domain_requires_v_at_least_one() {
        let sp = SpaceParams::besov_morrey(1, 1.5, 2.0, 2.0, 2.0, 0.5, 2);
        let dom = DomainSpec::half_line(0.0, BoxRegion::new(vec![-1.0], vec![1.0]).unwrap()).unwrap();
        let v = validate(&sp, &dom, Flavor::Osc);
        assert!(v.violations().iter().any(|m| m.contains("requires v >= 1")));
    }

    #[test]
    fn json_encodes_infinity() {
        let sp = SpaceParams { q: f64::INFINITY, ..SpaceParams::besov_type(2, 0.8, 2.0, 0.15, 2.0, 2.0, 2) };
        let text = serde_json::to_string(&sp).unwrap();
        assert!(text.contains("\"q\":\"inf\""), "{text}");
        let back: SpaceParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sp);
    }
}
