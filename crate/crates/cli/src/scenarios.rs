//! The scenario table printed by `fracdisp list`.

use crate::config::Kind;

pub struct Scenario {
    pub kind: Kind,
    pub module: &'static str,
    /// The statement the scenario exercises.
    pub anchor: &'static str,
    pub command: &'static str,
}

pub fn scenario(kind: Kind) -> Scenario {
    let (module, anchor, command) = match kind {
        Kind::MlfEval => ("mlf", "Mittag-Leffler routes (series, integral, asymptotic)", "mlf"),
        Kind::Kernel => ("kernels", "oscillatory kernel K_t and its sup", "kernel"),
        Kind::Propagate => ("spectral", "solution operators E_{a,1}, E_{a,a}, e^{-itD^d}", "propagate"),
        Kind::Solve => ("solver", "mild solution by Picard iteration", "solve"),
        Kind::Norms => ("norms", "L^p, Sobolev, X_kappa and lambda functionals", "norms"),
        Kind::VerifyDispersive => ("verify", "dispersive estimate for e^{-itD^d}", "verify dispersive"),
        Kind::VerifyDerivativeLoss => ("verify", "dispersive estimate with derivative loss", "verify derivative-loss"),
        Kind::VerifyMlfDecay => ("verify", "decay of the Mittag-Leffler operators", "verify mlf-decay"),
        Kind::VerifyKernel => ("verify", "kernel boundedness and scaling", "verify kernel"),
        Kind::VerifySmoothing => ("verify", "Plancherel smoothing identity", "verify smoothing"),
        Kind::VerifySmoothingBound => ("verify", "global smoothing estimate", "verify smoothing-bound"),
        Kind::VerifyPicard => ("verify", "small-data global solutions (contraction)", "verify picard"),
        Kind::VerifySelfSimilarity => ("verify", "self-similar solutions", "verify self-similarity"),
        Kind::VerifyBetaLt2 => ("verify", "local solutions for beta < 2", "verify beta-lt2"),
        Kind::VerifyAsymptotic => ("verify", "asymptotic link to the linear flow", "verify asymptotic"),
    };
    Scenario {
        kind,
        module,
        anchor,
        command,
    }
}

/// Scenarios whose module or id matches the filter; all when it is absent.
pub fn filtered(filter: Option<&str>) -> Vec<Scenario> {
    Kind::ALL
        .into_iter()
        .map(scenario)
        .filter(|s| filter.map_or(true, |f| s.module == f || s.kind.id() == f))
        .collect()
}

pub fn table(rows: &[Scenario]) -> String {
    let header = ["scenario", "module", "command", "statement"];
    let cells: Vec<[&str; 4]> = rows
        .iter()
        .map(|s| [s.kind.id(), s.module, s.command, s.anchor])
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |r: [&str; 4]| {
        let mut s = String::new();
        for (i, c) in r.iter().enumerate() {
            if i + 1 == r.len() {
                s.push_str(c);
            } else {
                s.push_str(&format!("{c:<w$}  ", w = width[i]));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header);
    for row in cells {
        out.push_str(&line(row));
    }
    out
}
