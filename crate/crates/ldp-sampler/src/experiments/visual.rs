//! The density-grid visual: one fixed 2-D four-component mixture privatized
//! four ways (local/global x pure/Gaussian), emitted as CSV matrices.

use serde_json::json;

use crate::distributions::{LaplaceMixture, UniverseSpec};
use crate::divergence::QuadratureConfig;
use crate::error::Result;
use crate::numerics::linspace;
use crate::samplers::{ClipSampler, ContinuousOutput, LinearSampler, OutputRepr};
use crate::tradeoff::TradeoffFunction;

/// Visual configuration; defaults follow the figure setup: scale 2 mixture
/// with unit-cross means, bands (1/2, 2) and (1/6, 6), eps = 1, nu = 1.5,
/// window [-8, 8]^2 at 256 points per axis.
#[derive(Clone, Debug)]
pub struct VisualConfig {
    pub seed: u64,
    pub epsilon: f64,
    pub nu: f64,
    pub scale: f64,
    pub window_half: f64,
    pub window_points: usize,
    /// The normalizer is solved on a wider grid so clipping constants do not
    /// inherit the window truncation.
    pub solve_half: f64,
    pub solve_points: usize,
    pub local_bounds: (f64, f64),
    pub global_bounds: (f64, f64),
}

impl Default for VisualConfig {
    fn default() -> Self {
        VisualConfig {
            seed: 0,
            epsilon: 1.0,
            nu: 1.5,
            scale: 2.0,
            window_half: 8.0,
            window_points: 256,
            solve_half: 48.0,
            solve_points: 512,
            local_bounds: (0.5, 2.0),
            global_bounds: (1.0 / 6.0, 6.0),
        }
    }
}

/// One emitted density grid over the square window, row-major over (x, y).
#[derive(Clone, Debug)]
pub struct VisualGrid {
    pub name: String,
    pub half_width: f64,
    pub points: usize,
    pub values: Vec<f64>,
    /// Mass of the underlying density on the wide solve grid;
    /// ~1 for every output.
    pub mass_on_solve_grid: f64,
}

impl VisualGrid {
    /// CSV matrix with one metadata header row.
    pub fn to_csv(&self, seed: u64) -> String {
        let mut out = format!(
            "# grid={},xmin={},xmax={},nx={},ymin={},ymax={},ny={},seed={}\n",
            self.name,
            -self.half_width,
            self.half_width,
            self.points,
            -self.half_width,
            self.half_width,
            self.points,
            seed
        );
        for row in self.values.chunks(self.points) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct VisualResult {
    pub config: serde_json::Value,
    pub grids: Vec<VisualGrid>,
}

/// The figure's input distribution: four scale-2 components at the unit
/// cross, equal weights.
pub fn visual_input_mixture(scale: f64) -> Result<LaplaceMixture> {
    LaplaceMixture::new(
        2,
        scale,
        vec![0.25; 4],
        vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ],
    )
}

/// Produce the five grids: input, local/global pure, local/global Gaussian.
pub fn run_visual(cfg: &VisualConfig) -> Result<VisualResult> {
    let input = visual_input_mixture(cfg.scale)?;
    let reference = LaplaceMixture::reference(2, cfg.scale)?;
    let solve_grid = QuadratureConfig::symmetric(2, cfg.solve_half, cfg.solve_points)?;

    let local_u = UniverseSpec::continuous(cfg.local_bounds.0, cfg.local_bounds.1, reference.clone())?;
    let global_u =
        UniverseSpec::continuous(cfg.global_bounds.0, cfg.global_bounds.1, reference.clone())?;

    let g_nu = TradeoffFunction::gaussian(cfg.nu)?;
    let outputs: Vec<(&str, ContinuousOutput)> = vec![
        (
            "local-pure",
            take_continuous(ClipSampler::new(local_u.clone(), cfg.epsilon)?.apply_mixture(&input, &solve_grid)?.repr),
        ),
        (
            "global-pure",
            take_continuous(ClipSampler::new(global_u.clone(), cfg.epsilon)?.apply_mixture(&input, &solve_grid)?.repr),
        ),
        (
            "local-gldp",
            take_continuous(LinearSampler::minimax(local_u.clone(), g_nu)?.apply_mixture(&input, &solve_grid)?.repr),
        ),
        (
            "global-gldp",
            take_continuous(LinearSampler::minimax(global_u.clone(), g_nu)?.apply_mixture(&input, &solve_grid)?.repr),
        ),
    ];

    let axis = linspace(-cfg.window_half, cfg.window_half, cfg.window_points);
    let render = |density: &dyn Fn(&[f64]) -> f64| -> Vec<f64> {
        let mut values = Vec::with_capacity(cfg.window_points * cfg.window_points);
        for &x in &axis {
            for &y in &axis {
                values.push(density(&[x, y]));
            }
        }
        values
    };
    let mass_of = |density: &dyn Fn(&[f64]) -> f64| -> f64 {
        let mut mass = 0.0;
        solve_grid.for_each_node(|x, w| mass += w * density(x));
        mass
    };

    let mut grids = Vec::with_capacity(5);
    let input_density = |x: &[f64]| input.density(x);
    grids.push(VisualGrid {
        name: "input".into(),
        half_width: cfg.window_half,
        points: cfg.window_points,
        values: render(&input_density),
        mass_on_solve_grid: mass_of(&input_density),
    });
    for (name, out) in &outputs {
        let density = |x: &[f64]| out.density(x);
        grids.push(VisualGrid {
            name: (*name).into(),
            half_width: cfg.window_half,
            points: cfg.window_points,
            values: render(&density),
            mass_on_solve_grid: mass_of(&density),
        });
    }

    Ok(VisualResult {
        config: json!({
            "id": "visual",
            "seed": cfg.seed,
            "epsilon": cfg.epsilon,
            "nu": cfg.nu,
            "scale": cfg.scale,
            "window_half": cfg.window_half,
            "window_points": cfg.window_points,
            "solve_half": cfg.solve_half,
            "solve_points": cfg.solve_points,
            "local_bounds": cfg.local_bounds,
            "global_bounds": cfg.global_bounds,
        }),
        grids,
    })
}

fn take_continuous(repr: OutputRepr) -> ContinuousOutput {
    match repr {
        OutputRepr::Continuous(c) => c,
        OutputRepr::Discrete(_) => unreachable!("visual samplers are continuous"),
    }
}
