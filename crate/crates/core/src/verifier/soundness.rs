use serde::{Deserialize, Serialize};

use super::{
    check_distance_hardy, check_e_weight, check_hardy_rellich_radial, check_improved_hardy, profile_family,
    CheckOutcome, EWeightMode, FamilyMember,
};
use crate::bessel_certify::{is_bessel_pair, is_hi_potential, PairSpec};
use crate::error::Result;
use crate::weight_dsl::{parse_weight, standard_potentials, WeightExpr};

/// One verifier evaluation inside a soundness sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub kind: String,
    pub input: String,
    pub n: u32,
    pub profile: String,
    pub margin: f64,
    pub error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessSummary {
    pub seed: u64,
    pub radius: f64,
    /// Inputs that were certified and therefore exercised.
    pub certified_inputs: Vec<String>,
    /// Candidate inputs whose certificate was not positive (skipped).
    pub rejected_inputs: Vec<String>,
    pub total: usize,
    pub unsound: usize,
    pub records: Vec<CheckRecord>,
}

impl SoundnessSummary {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

fn push(records: &mut Vec<CheckRecord>, kind: &str, input: &str, n: u32, m: &FamilyMember, o: CheckOutcome) {
    records.push(CheckRecord {
        kind: kind.into(),
        input: input.into(),
        n,
        profile: m.label.clone(),
        margin: o.margin,
        error: o.error,
        pass: o.pass,
    });
}

/// Runs every verifier family over the seeded 50-profile family on `(0, radius)`.
///
/// Improved Hardy uses catalog potentials certified as HI-potentials on the
/// ball; Hardy–Rellich uses shifted pairs certified as Bessel pairs; the
/// E-weight and point-distance forms have closed-form admissibility.
pub fn soundness_sweep(seed: u64, radius: f64) -> Result<SoundnessSummary> {
    let mut certified = Vec::new();
    let mut rejected = Vec::new();
    let mut records = Vec::new();

    let potentials: Vec<(String, WeightExpr)> = standard_potentials()
        .into_iter()
        .filter(|(label, p)| {
            let ok = p.domain_max >= radius && is_hi_potential(p, radius).map(|c| c.is_positive()).unwrap_or(false);
            if !ok {
                rejected.push(format!("hi:{label}"));
            }
            ok
        })
        .collect();
    certified.extend(potentials.iter().map(|(l, _)| format!("hi:{l}")));

    for n in [3u32, 4] {
        let family = profile_family(seed, radius, n)?;
        for m in &family {
            for (label, p) in &potentials {
                push(&mut records, "improved_hardy", label, n, m, check_improved_hardy(p, &m.function, n, radius)?);
            }
            push(&mut records, "distance_point", &format!("k={n}"), n, m, check_distance_hardy(n, &m.function, n, radius)?);
        }
    }

    let n = 3;
    let family = profile_family(seed, radius, n)?;
    let e_weights = [
        ("pow(r,-1)", EWeightMode::Interior),
        (&*format!("pow(r,-1) - {:e}", 1.0 / radius), EWeightMode::Boundary),
        (&*format!("{:e} - pow(r,2)", radius * radius), EWeightMode::Boundary),
    ]
    .map(|(t, m)| (t.to_string(), m));
    for (text, mode) in &e_weights {
        let e = parse_weight(text)?;
        let tag = format!("{text} ({mode:?})");
        certified.push(format!("e:{tag}"));
        for m in &family {
            push(&mut records, "e_weight", &tag, n, m, check_e_weight(&e, *mode, &m.function, n)?);
        }
    }

    let n = 5;
    let family = profile_family(seed, radius, n)?;
    let mut pairs = Vec::new();
    for lambda in [0.0, 1.0, 2.0] {
        for (plabel, ptext) in [("0", "0"), ("1", "1"), ("r^-1", "pow(r,-1)")] {
            let v = WeightExpr::monomial(-lambda);
            let c = ((n as f64 - lambda - 2.0) / 2.0).powi(2);
            let w = parse_weight(&format!("{c:e} * pow(r,{:e}) + pow(r,{:e}) * ({ptext})", -lambda - 2.0, -lambda))?;
            let label = format!("pair(lambda={lambda},P={plabel})");
            let spec = PairSpec::new(v, w, n, radius, Some(lambda))?;
            if is_bessel_pair(&spec)?.is_positive() {
                certified.push(format!("pair:{label}"));
                pairs.push((label, spec));
            } else {
                rejected.push(format!("pair:{label}"));
            }
        }
    }
    for m in &family {
        for (label, spec) in &pairs {
            let o = check_hardy_rellich_radial(&spec.v, &spec.w, &m.function, n, radius)?;
            push(&mut records, "hardy_rellich_radial", label, n, m, o);
        }
    }

    let unsound = records.iter().filter(|r| !r.pass).count();
    Ok(SoundnessSummary {
        seed,
        radius,
        certified_inputs: certified,
        rejected_inputs: rejected,
        total: records.len(),
        unsound,
        records,
    })
}
