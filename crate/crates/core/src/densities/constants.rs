use serde::{Deserialize, Serialize};

/// L1..L4 of the Q-tensor elastic density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticConstants {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

impl ElasticConstants {
    pub fn new(l1: f64, l2: f64, l3: f64, l4: f64) -> Self {
        Self { l1, l2, l3, l4 }
    }

    pub fn one_constant(l1: f64) -> Self {
        Self::new(l1, 0.0, 0.0, 0.0)
    }
}

/// Frank constants: splay, twist, bend, saddle-splay (surface).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrankConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl FrankConstants {
    pub fn new(k1: f64, k2: f64, k3: f64, k4: f64) -> Self {
        Self { k1, k2, k3, k4 }
    }

    /// p-azoxyanisole at 120 °C (units of 1e-12 N). k4 is not measured; 0 is a choice.
    pub fn paa() -> Self {
        Self::new(5.0, 3.8, 10.1, 0.0)
    }

    /// k2 > |k4| and min{k1, k3} > (k2 + k4)/2.
    pub fn strong_ericksen(&self) -> bool {
        self.k2 > self.k4.abs() && self.k1.min(self.k3) > 0.5 * (self.k2 + self.k4)
    }

    /// min{k2 - |k4|, 2k1 - k2 - k4, 2k3 - k2 - k4}.
    pub fn alpha_tilde(&self) -> f64 {
        let s = self.k2 + self.k4;
        (self.k2 - self.k4.abs()).min(2.0 * self.k1 - s).min(2.0 * self.k3 - s)
    }
}

/// The rescaled constants L̂1..L̂4 of the coercive Q-tensor form of W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatConstants {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

impl HatConstants {
    pub fn alpha(&self) -> f64 {
        self.l1.min(self.l2).min(self.l3).min(self.l4)
    }
}

pub fn frank_to_elastic(k: &FrankConstants, s_plus: f64) -> ElasticConstants {
    let s2 = s_plus * s_plus;
    ElasticConstants {
        l1: (-k.k1 / 6.0 + k.k2 / 2.0 + k.k3 / 6.0) / s2,
        l2: (k.k1 - k.k2 - k.k4) / s2,
        l3: k.k4 / s2,
        l4: (k.k3 - k.k1) / (2.0 * s2 * s_plus),
    }
}

pub fn elastic_to_frank(l: &ElasticConstants, s_plus: f64) -> FrankConstants {
    let s2 = s_plus * s_plus;
    let k4 = s2 * l.l3;
    let bend_minus_splay = 2.0 * s2 * s_plus * l.l4;
    let k2 = 2.0 * (s2 * l.l1 - bend_minus_splay / 6.0);
    let k1 = s2 * l.l2 + k2 + k4;
    let k3 = k1 + bend_minus_splay;
    FrankConstants { k1, k2, k3, k4 }
}

pub fn frank_to_hat(k: &FrankConstants, s_plus: f64) -> HatConstants {
    let f = 0.5 / (s_plus * s_plus);
    HatConstants {
        l1: f * (2.0 * k.k1 - k.k2 - k.k4),
        l2: f * (2.0 * k.k3 - k.k2 - k.k4),
        l3: f * (k.k2 - k.k4),
        l4: f * (k.k2 + k.k4),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub holds: bool,
    /// Smallest slack among the strict inequalities.
    pub margin: f64,
    /// (name, slack); strict ones need slack > 0, `L4 >= 0` needs slack >= 0.
    pub slacks: Vec<(&'static str, f64)>,
    pub failing: Vec<&'static str>,
}

/// The four constant conditions under which the new density is used.
pub fn check_condition_l(l: &ElasticConstants, s_plus: f64) -> ConditionReport {
    let base = l.l1 - s_plus * l.l4 / 6.0;
    let strict = [
        ("L1 - s+L4/6 > 0", base),
        ("L3 > -L1 - s+L4/6", l.l3 + l.l1 + s_plus * l.l4 / 6.0),
        ("L3 < 2L1 - s+L4/3", 2.0 * l.l1 - s_plus * l.l4 / 3.0 - l.l3),
        ("L1 - s+L4/6 + 5L2/3 + L3/6 > 0", base + 5.0 * l.l2 / 3.0 + l.l3 / 6.0),
    ];
    let mut failing: Vec<&'static str> = strict.iter().filter(|(_, v)| !(*v > 0.0)).map(|(n, _)| *n).collect();
    if !(l.l4 >= 0.0) {
        failing.push("L4 >= 0");
    }
    let margin = strict.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let mut slacks = strict.to_vec();
    slacks.push(("L4 >= 0", l.l4));
    ConditionReport { holds: failing.is_empty(), margin, slacks, failing }
}
