//! Two-dimensional projection of the qubit toy state space.
//!
//! `x = tr(ω̄ (Z⊗I + I⊗Z))/2` and `y = ⟨Φ|ω̄|Φ⟩` with
//! `Φ = (|01⟩ + |10⟩)/√2`. Pure states land on `y = (1 − x²)/2`, the
//! doubled basis states on `(±1, 0)`, and reduced states with marginal Bloch
//! vector `r` on `x = r_z`, `y = (1 − r_z²)/3 + (r_x² + r_y²)/6`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{random_pure_state_with, ComplexMatrix, StateVector};

use super::composite::{reduced_state, BipartiteVector};
use super::state::{Ensemble, ToyState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Pure,
    Mixed,
    Reduced,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Pure => "pure",
            PointKind::Mixed => "mixed",
            PointKind::Reduced => "reduced",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureData {
    pub pure: Vec<(f64, f64)>,
    pub mixed: Vec<(f64, f64)>,
    pub reduced: Vec<(f64, f64)>,
}

impl FigureData {
    pub fn points(&self) -> impl Iterator<Item = (PointKind, (f64, f64))> + '_ {
        fn tag(
            kind: PointKind,
            pts: &[(f64, f64)],
        ) -> impl Iterator<Item = (PointKind, (f64, f64))> + '_ {
            pts.iter().map(move |&p| (kind, p))
        }
        tag(PointKind::Pure, &self.pure)
            .chain(tag(PointKind::Mixed, &self.mixed))
            .chain(tag(PointKind::Reduced, &self.reduced))
    }

    /// CSV with header `kind,x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,x,y\n");
        for (kind, (x, y)) in self.points() {
            writeln!(out, "{},{x:.17e},{y:.17e}", kind.as_str()).expect("writing to a String");
        }
        out
    }
}

/// Projection of a two-copy qubit matrix to the plane.
pub fn project(omega: &ComplexMatrix) -> (f64, f64) {
    // Z⊗I + I⊗Z is diag(2, 0, 0, −2) in the basis |00⟩, |01⟩, |10⟩, |11⟩.
    let x = omega[(0, 0)].re - omega[(3, 3)].re;
    let y = 0.5 * (omega[(1, 1)] + omega[(1, 2)] + omega[(2, 1)] + omega[(2, 2)]).re;
    (x, y)
}

/// `samples` points in each of the pure, mixed and reduced clouds.
///
/// The pure cloud starts with the two doubled basis states and the mixed
/// cloud with `½(|0⟩⟨0|^{⊗2} + |1⟩⟨1|^{⊗2})` and its neighbours on the
/// segment between them; the rest is random.
pub fn figure_data(samples: usize, seed: u64) -> FigureData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);

    let mut pure = Vec::with_capacity(samples);
    for corner in [&zero, &one].into_iter().take(samples) {
        pure.push(project(&corner.doubled_projector()));
    }
    while pure.len() < samples {
        pure.push(project(
            &random_pure_state_with(2, &mut rng).doubled_projector(),
        ));
    }

    let mut mixed = Vec::with_capacity(samples);
    for p in [0.5, 0.25, 0.75, 0.1, 0.9].into_iter().take(samples) {
        let ensemble = Ensemble::new(vec![(p, zero.clone()), (1.0 - p, one.clone())])
            .expect("weights sum to one");
        mixed.push(project(
            ToyState::from_ensemble(&ensemble).expect("valid").matrix(),
        ));
    }
    while mixed.len() < samples {
        let count = rng.random_range(2..=4);
        let raw: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let members = raw
            .iter()
            .map(|w| (w / total, random_pure_state_with(2, &mut rng)))
            .collect::<Vec<_>>();
        let ensemble = Ensemble { members };
        mixed.push(project(&ensemble.doubled_matrix()));
    }

    let reduced = (0..samples)
        .map(|_| {
            let psi = BipartiteVector::new(2, 2, random_pure_state_with(4, &mut rng))
                .expect("dimensions match");
            project(reduced_state(&psi).matrix())
        })
        .collect();

    FigureData {
        pure,
        mixed,
        reduced,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_and_witness() {
        let data = figure_data(20, 3);
        assert_eq!(data.pure[0], (1.0, 0.0));
        assert_eq!(data.pure[1], (-1.0, 0.0));
        assert!(data.mixed[0].0.abs() < 1e-15 && data.mixed[0].1.abs() < 1e-15);
    }

    #[test]
    fn pure_parabola() {
        let data = figure_data(500, 11);
        for (x, y) in &data.pure {
            assert!((y - (1.0 - x * x) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_shape() {
        let csv = figure_data(3, 1).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("kind,x,y"));
        assert_eq!(lines.count(), 9);
    }
}
