//! Rotating-frame Hamiltonian, relaxation superoperator and their assembly
//! into a 16×16 Liouvillian.
//!
//! Vectorization is column stacking: `vec(ρ)[i + 4j] = ρ[i, j]`.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::density::{Level, Matrix4c};
use crate::model::{Configuration, FieldRole, RelaxationRates, TripodModel};

pub type Superoperator = SMatrix<Complex64, 16, 16>;
pub type VecRho = SVector<Complex64, 16>;

const DIM: usize = 4;

#[inline]
pub const fn vec_index(row: usize, col: usize) -> usize {
    row + DIM * col
}

pub fn vectorize(rho: &Matrix4c) -> VecRho {
    VecRho::from_iterator(rho.iter().copied())
}

pub fn unvectorize(v: &VecRho) -> Matrix4c {
    Matrix4c::from_iterator(v.iter().copied())
}

/// Which drive's frequency has been removed from each ground level's phase.
/// Coherences ρ_eg of a level tagged with a role oscillate at that field's
/// frequency in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotatingFrame {
    pub configuration: Configuration,
    ground_fields: [FieldRole; 3],
}

impl RotatingFrame {
    pub fn for_configuration(configuration: Configuration) -> Self {
        let ground_fields = match configuration {
            Configuration::Config1 => [FieldRole::Probe, FieldRole::Coupling, FieldRole::Probe],
            Configuration::Config2 => [FieldRole::Coupling, FieldRole::Probe, FieldRole::Coupling],
        };
        Self { configuration, ground_fields }
    }

    /// Field driving e–`ground`. `None` for the excited level.
    pub fn field_of(&self, level: Level) -> Option<FieldRole> {
        match level {
            Level::Excited => None,
            other => Some(self.ground_fields[other.index() - 1]),
        }
    }

    /// Ground levels whose optical coherence carries the probe.
    pub fn probe_levels(&self) -> Vec<Level> {
        Level::GROUND.into_iter().filter(|l| self.field_of(*l) == Some(FieldRole::Probe)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianRwa {
    pub matrix: Matrix4c,
    pub frame: RotatingFrame,
}

/// Rotating-frame Hamiltonian in scaled units (ħ = 1). The excited level sits
/// at zero; ground level g carries minus the optical detuning of its drive,
/// shifted by its Zeeman energy m·Δ̄_Z.
pub fn build_hamiltonian(model: &TripodModel) -> HamiltonianRwa {
    let frame = RotatingFrame::for_configuration(model.configuration());
    let probe = model.probe();
    let coupling = model.coupling();
    let dz = model.zeeman().delta_z_bar;

    let mut h = Matrix4c::zeros();
    for (level, zeeman) in [(Level::GroundMinus, -dz), (Level::GroundZero, 0.0), (Level::GroundPlus, dz)] {
        let (detuning, rabi_amplitude) = match frame.field_of(level) {
            Some(FieldRole::Probe) => (probe.detuning_bar, probe.rabi_bar),
            _ => (coupling.detuning_bar, coupling.rabi_bar),
        };
        // σ components carry half the intensity of the linearly polarized beam.
        let clebsch = if level == Level::GroundZero { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
        let g = level.index();
        h[(g, g)] = Complex64::new(-detuning + zeeman, 0.0);
        let coupling_element = Complex64::new(-0.5 * rabi_amplitude * clebsch, 0.0);
        h[(0, g)] = coupling_element;
        h[(g, 0)] = coupling_element.conj();
    }
    HamiltonianRwa { matrix: h, frame }
}

/// Relaxation superoperator in the vectorized representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation(pub Superoperator);

/// Spontaneous decay of e into the three ground sublevels at Γ̄₀/3 each,
/// transit loss of every population at Γ̄_t refilled as the isotropic ground
/// mixture, and total coherence decay at `optical_bar` (e–g) or `raman_bar`
/// (g–g').
pub fn build_relaxation(rates: &RelaxationRates) -> Relaxation {
    let mut r = Superoperator::zeros();
    let ee = vec_index(0, 0);
    let grounds: Vec<usize> = Level::GROUND.iter().map(|l| vec_index(l.index(), l.index())).collect();

    r[(ee, ee)] -= Complex64::from(rates.gamma0_bar);
    for &g in &grounds {
        r[(g, ee)] += Complex64::from(rates.gamma0_bar / 3.0);
    }
    for level in Level::ALL {
        let p = vec_index(level.index(), level.index());
        r[(p, p)] -= Complex64::from(rates.transit_bar);
        for &g in &grounds {
            r[(g, p)] += Complex64::from(rates.transit_bar / 3.0);
        }
    }
    for i in 0..DIM {
        for j in 0..DIM {
            if i == j {
                continue;
            }
            let rate = if i == 0 || j == 0 { rates.optical_bar } else { rates.raman_bar };
            let k = vec_index(i, j);
            r[(k, k)] -= Complex64::from(rate);
        }
    }
    Relaxation(r)
}

/// Generator of dvec(ρ)/dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvillianMatrix {
    pub matrix: Superoperator,
}

impl LiouvillianMatrix {
    pub fn apply(&self, rho: &Matrix4c) -> Matrix4c {
        unvectorize(&(self.matrix * vectorize(rho)))
    }

    /// Induced ∞-norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.matrix.row_iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// max_k |Σ_i L[(i,i), k]|, the departure from trace preservation.
    pub fn trace_defect(&self) -> f64 {
        (0..16)
            .map(|k| (0..DIM).map(|i| self.matrix[(vec_index(i, i), k)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }
}

/// L·vec(ρ) = vec(−i[H, ρ]) + R·vec(ρ).
pub fn assemble_liouvillian(hamiltonian: &HamiltonianRwa, relaxation: &Relaxation) -> LiouvillianMatrix {
    let h = &hamiltonian.matrix;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut l = relaxation.0;
    for i in 0..DIM {
        for j in 0..DIM {
            let row = vec_index(i, j);
            for k in 0..DIM {
                // (Hρ)_ij = Σ_k H_ik ρ_kj
                l[(row, vec_index(k, j))] += minus_i * h[(i, k)];
                // (ρH)_ij = Σ_k ρ_ik H_kj
                l[(row, vec_index(i, k))] -= minus_i * h[(k, j)];
            }
        }
    }
    LiouvillianMatrix { matrix: l }
}

pub fn liouvillian(model: &TripodModel) -> LiouvillianMatrix {
    assemble_liouvillian(&build_hamiltonian(model), &build_relaxation(model.rates()))
}
