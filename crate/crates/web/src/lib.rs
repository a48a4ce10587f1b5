//! WebAssembly bindings behind `www/index.html`: the phase constant of a
//! symmetric model, one sample-and-fit run, and a small separation sweep.

use sbm_core::experiments::{default_separation_grid, sweep_separation, SweepConfig};
use sbm_core::{
    ch_constant, greedy_argmax, misclassification, nmi, sample, Alpha, Objective, RhoMode,
    SbmParams, SearchConfig,
};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct Constant {
    value: f64,
    argmax_t: f64,
    k: usize,
}

#[wasm_bindgen]
impl Constant {
    #[wasm_bindgen(getter)]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[wasm_bindgen(getter, js_name = argmaxT)]
    pub fn argmax_t(&self) -> f64 {
        self.argmax_t
    }

    /// `C >= 1`
    #[wasm_bindgen(getter, js_name = mlRecovers)]
    pub fn ml_recovers(&self) -> bool {
        self.value >= 1.0
    }

    /// `C >= 1 + k²`
    #[wasm_bindgen(getter, js_name = iclRecovers)]
    pub fn icl_recovers(&self) -> bool {
        self.value >= 1.0 + (self.k * self.k) as f64
    }
}

pub fn constant_of(k: usize, s1: f64, s2: f64) -> sbm_core::Result<Constant> {
    let params = SbmParams::symmetric(k, s1, s2, RhoMode::LogNOverN)?;
    let c = ch_constant(&params)?;
    Ok(Constant {
        value: c.value,
        argmax_t: c.argmax_t,
        k,
    })
}

#[wasm_bindgen(js_name = phaseConstant)]
pub fn phase_constant(k: usize, s1: f64, s2: f64) -> Result<Constant, JsError> {
    constant_of(k, s1, s2).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct FitDemo {
    n: usize,
    nmi: f64,
    misclassified: usize,
    objective_value: f64,
    truth: Vec<u32>,
    estimate: Vec<u32>,
    edges: Vec<u32>,
}

#[wasm_bindgen]
impl FitDemo {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[wasm_bindgen(getter)]
    pub fn nmi(&self) -> f64 {
        self.nmi
    }

    #[wasm_bindgen(getter)]
    pub fn misclassified(&self) -> usize {
        self.misclassified
    }

    #[wasm_bindgen(getter, js_name = objectiveValue)]
    pub fn objective_value(&self) -> f64 {
        self.objective_value
    }

    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<u32> {
        self.truth.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> Vec<u32> {
        self.estimate.clone()
    }

    /// Edge endpoints, flattened as `i0, j0, i1, j1, ...` (0-based).
    #[wasm_bindgen(getter)]
    pub fn edges(&self) -> Vec<u32> {
        self.edges.clone()
    }
}

/// Samples a balanced symmetric network with `rho = c * log(n) / n` and fits
/// it by greedy hill climbing.
pub fn fit_once(
    n: usize,
    k: usize,
    s1: f64,
    s2: f64,
    c: f64,
    icl: bool,
    seed: u64,
) -> sbm_core::Result<FitDemo> {
    let params = SbmParams::symmetric(k, s1, s2, RhoMode::ScaledLogNOverN(c))?;
    let (truth, g) = sample(&params, n, seed)?;
    let objective = if icl { Objective::Icl } else { Objective::Ml };
    let cfg = SearchConfig::new(objective, Alpha::new(1, 20)?)
        .restarts(10)
        .seed(seed);
    let fit = greedy_argmax(&g, k, &cfg)?;
    let labels = |z: &sbm_core::Labeling| z.labels().iter().map(|&l| l as u32).collect();
    Ok(FitDemo {
        n,
        nmi: nmi(&fit.labeling, &truth)?,
        misclassified: misclassification(&fit.labeling, &truth)?,
        objective_value: fit.objective_value,
        truth: labels(&truth),
        estimate: labels(&fit.labeling),
        edges: g.edges().flat_map(|(i, j)| [i as u32, j as u32]).collect(),
    })
}

#[wasm_bindgen(js_name = sampleAndFit)]
pub fn sample_and_fit(
    n: usize,
    k: usize,
    s1: f64,
    s2: f64,
    c: f64,
    icl: bool,
    seed: u64,
) -> Result<FitDemo, JsError> {
    fit_once(n, k, s1, s2, c, icl, seed).map_err(|e| JsError::new(&e.to_string()))
}

/// Mean NMI over the default separation grid, flattened as
/// `separation, ml, icl` triples.
pub fn curve(n: usize, k: usize, reps: usize, seed: u64) -> sbm_core::Result<Vec<f64>> {
    let mut cfg = SweepConfig::new(n, k);
    cfg.reps = reps;
    cfg.base_seed = seed;
    cfg.restarts = 10;
    let grid = default_separation_grid(k);
    let out = sweep_separation(&cfg, &grid)?;
    let summary = out.summarize(|r| r.separation);
    let mut flat = Vec::with_capacity(grid.len() * 3);
    for &x in &grid {
        let mean = |o: Objective| {
            summary
                .iter()
                .find(|p| p.x == x && p.objective == o)
                .map_or(f64::NAN, |p| p.mean_nmi)
        };
        flat.extend([x, mean(Objective::Ml), mean(Objective::Icl)]);
    }
    Ok(flat)
}

#[wasm_bindgen(js_name = separationCurve)]
pub fn separation_curve(n: usize, k: usize, reps: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    curve(n, k, reps, seed).map_err(|e| JsError::new(&e.to_string()))
}
