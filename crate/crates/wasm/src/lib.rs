//! wasm-bindgen entry points for the static demo in `www/`.
//!
//! Every function takes plain numbers and returns a JSON string, so the page
//! needs nothing beyond `JSON.parse`. Errors come back as strings.

use ldg_core::bulk::bulk_shifted;
use ldg_core::densities::{
    check_condition_l, estimate_alpha, frank_to_elastic, non_coercivity_witness, FrankConstants,
};
use ldg_core::solver::{make_hedgehog_field, minimize, total_energy, DensityKind, SolverConfig};
use ldg_core::{MaterialConstants, QTensor};
use nalgebra::Vector3;
use serde_json::json;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn material(a: f64, b: f64, c: f64) -> Result<MaterialConstants, String> {
    MaterialConstants::new(a, b, c).map_err(|e| e.to_string())
}

/// Shifted bulk energy along the uniaxial family s(e_z⊗e_z − I/3) for
/// `n` values of s evenly spaced in [s_min, s_max].
#[wasm_bindgen]
pub fn bulk_profile(a: f64, b: f64, c: f64, s_min: f64, s_max: f64, n: usize) -> Out {
    let mc = material(a, b, c)?;
    if n < 2 || s_min.is_nan() || s_max.is_nan() || s_max <= s_min {
        return Err("need n >= 2 and s_max > s_min".into());
    }
    let ez = Vector3::z();
    let mut s = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for i in 0..n {
        let si = s_min + (s_max - s_min) * i as f64 / (n - 1) as f64;
        let q = QTensor::from_director(&ez, si).map_err(|e| e.to_string())?;
        s.push(si);
        f.push(bulk_shifted(&q, &mc));
    }
    Ok(json!({ "s_plus": mc.s_plus(), "lambda": mc.lambda(), "s": s, "f": f }).to_string())
}

/// Converts Frank constants, checks condition (L) and estimates the
/// coercivity constant of the new density; also reports how negative the
/// original density gets along Q = tQ⁺ when L4 ≠ 0.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn coercivity(k1: f64, k2: f64, k3: f64, k4: f64, a: f64, b: f64, c: f64, samples: usize, seed: u64) -> Out {
    let mc = material(a, b, c)?;
    let s = mc.s_plus();
    let k = FrankConstants::new(k1, k2, k3, k4);
    let l = frank_to_elastic(&k, s);
    let cond = check_condition_l(&l, s);
    let alpha = match estimate_alpha(&l, s, samples.max(1), seed) {
        Ok(r) => json!({ "alpha": r.alpha, "negative_samples": r.negative_samples, "samples": r.samples }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let witness = match non_coercivity_witness(&l, s, -1e3) {
        Ok(w) => json!({ "t": w.t, "value": w.value, "doublings": w.doublings }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "s_plus": s,
        "elastic": l,
        "strong_ericksen": k.strong_ericksen(),
        "condition_l": { "holds": cond.holds, "margin": cond.margin, "failing": cond.failing },
        "alpha": alpha,
        "witness": witness,
    })
    .to_string())
}

/// Relaxes the radial hedgehog on an n³ grid over [-1, 1]³ with the
/// one-constant density and returns the energy log together with the scalar
/// |Q|/|Q⁺| on the mid plane z = 0, row-major in (x, y).
#[wasm_bindgen]
pub fn relax_hedgehog(n: usize, l: f64, a: f64, b: f64, c: f64, max_iters: usize) -> Out {
    let mc = material(a, b, c)?;
    if !(3..=25).contains(&n) || n.is_multiple_of(2) {
        return Err("n must be odd and between 3 and 25".into());
    }
    let h = 2.0 / (n - 1) as f64;
    let err = |e: ldg_core::Error| e.to_string();
    let f0 = make_hedgehog_field([n, n, n], h, &mc).map_err(err)?;
    let mut cfg =
        SolverConfig::new(l, ldg_core::densities::ElasticConstants::one_constant(1.0), mc, DensityKind::Original);
    cfg.max_iters = max_iters;
    cfg.validate().map_err(err)?;
    let (f, stats) = minimize(&f0, &cfg).map_err(err)?;
    let energy = total_energy(&f, &cfg).map_err(err)?;
    let scale = QTensor::q_plus(mc.s_plus()).norm();
    let k = n / 2;
    let mut slice = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            slice.push(f.get(f.index(i, j, k)).norm() / scale);
        }
    }
    Ok(json!({
        "n": n,
        "iterations": stats.iterations,
        "converged": stats.converged,
        "energy_log": stats.energy_log,
        "energy": energy,
        "slice": slice,
    })
    .to_string())
}
