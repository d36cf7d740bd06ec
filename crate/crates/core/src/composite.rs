//! Identical circular sub-arrays tiled along a line.
//!
//! Sub-array `k` is the base sub-array translated by `k * spacing` along the
//! line axis. Sensor `j` of sub-array `k` gets weight `e_k * w_j`, so the
//! total pattern is the sub-array pattern times the pattern of a line of
//! isotropic points driven by the excitations `e_k`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{propagation_delay, ArrayLayout, CarrierContext, Direction, SensorArray};
use crate::metrics::{
    directivity, rein, DirectivityMatrices, PatternSource, QuadratureSpec, WeightVector,
    WeightedArray,
};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineAxis {
    X,
    /// Broadside to a look direction along +x.
    #[default]
    Y,
    Z,
}

impl LineAxis {
    pub fn unit(&self) -> Vector3<f64> {
        match self {
            LineAxis::X => Vector3::x(),
            LineAxis::Y => Vector3::y(),
            LineAxis::Z => Vector3::z(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CompositeLayout", into = "CompositeLayout")]
pub struct CompositeArray {
    subarray: SensorArray,
    subarray_weights: WeightVector,
    spacing: f64,
    axis: LineAxis,
    excitations: WeightVector,
}

/// Serialized form: the sub-array layout plus the line parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeLayout {
    #[serde(flatten)]
    pub subarray: ArrayLayout,
    pub subarray_weights: WeightVector,
    pub count: usize,
    pub spacing_m: f64,
    #[serde(default)]
    pub axis: LineAxis,
    /// Defaults to all ones.
    #[serde(default)]
    pub excitations: Option<WeightVector>,
}

impl From<CompositeArray> for CompositeLayout {
    fn from(c: CompositeArray) -> Self {
        Self {
            count: c.count(),
            subarray: c.subarray.into(),
            subarray_weights: c.subarray_weights,
            spacing_m: c.spacing,
            axis: c.axis,
            excitations: Some(c.excitations),
        }
    }
}

impl TryFrom<CompositeLayout> for CompositeArray {
    type Error = Error;

    fn try_from(l: CompositeLayout) -> Result<Self> {
        let sub = SensorArray::try_from(l.subarray)?;
        let c = CompositeArray::new(sub, l.subarray_weights, l.count, l.spacing_m, l.axis)?;
        match l.excitations {
            Some(e) => c.with_excitations(e),
            None => Ok(c),
        }
    }
}

impl CompositeArray {
    /// `count` copies with uniform excitations.
    pub fn new(
        subarray: SensorArray,
        subarray_weights: WeightVector,
        count: usize,
        spacing: f64,
        axis: LineAxis,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGeometry(
                "composite needs at least one sub-array".into(),
            ));
        }
        if !(spacing.is_finite() && spacing >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "spacing {spacing} m must be >= 0"
            )));
        }
        if subarray_weights.len() != subarray.len() {
            return Err(Error::LengthMismatch {
                expected: subarray.len(),
                found: subarray_weights.len(),
            });
        }
        Ok(Self {
            subarray,
            subarray_weights,
            spacing,
            axis,
            excitations: WeightVector::uniform(count),
        })
    }

    pub fn with_excitations(mut self, excitations: WeightVector) -> Result<Self> {
        if excitations.len() != self.count() {
            return Err(Error::LengthMismatch {
                expected: self.count(),
                found: excitations.len(),
            });
        }
        self.excitations = excitations;
        Ok(self)
    }

    pub fn count(&self) -> usize {
        self.excitations.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn axis(&self) -> LineAxis {
        self.axis
    }

    pub fn subarray(&self) -> &SensorArray {
        &self.subarray
    }

    pub fn subarray_weights(&self) -> &WeightVector {
        &self.subarray_weights
    }

    pub fn excitations(&self) -> &WeightVector {
        &self.excitations
    }

    /// Phase centre of sub-array `k` relative to the base sub-array.
    pub fn offset(&self, k: usize) -> Vector3<f64> {
        self.axis.unit() * (k as f64 * self.spacing)
    }

    /// All sensors and their weights, sub-array major.
    pub fn flatten(&self) -> (SensorArray, WeightVector) {
        let mut positions = Vec::with_capacity(self.count() * self.subarray.len());
        let mut elements = Vec::with_capacity(positions.capacity());
        let mut weights = Vec::with_capacity(positions.capacity());
        for (k, e) in self.excitations.0.iter().enumerate() {
            let moved = self.subarray.translated(self.offset(k));
            positions.extend_from_slice(moved.positions());
            elements.extend_from_slice(moved.elements());
            weights.extend(self.subarray_weights.0.iter().map(|w| e * w));
        }
        let array = SensorArray::with_elements(positions, elements)
            .expect("translated sensors stay finite");
        (array, WeightVector::from_slice(&weights))
    }

    /// Pattern of the line of isotropic points weighted by the excitations.
    pub fn array_factor(&self, ctx: &CarrierContext, dir: &Direction) -> Complex64 {
        self.excitations
            .0
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let tau = propagation_delay(&self.offset(k), dir, ctx);
                e.conj() * Complex64::from_polar(1.0, ctx.omega() * tau)
            })
            .sum()
    }

    pub fn subarray_response(&self, ctx: &CarrierContext, dir: &Direction) -> Complex64 {
        WeightedArray {
            array: &self.subarray,
            ctx,
            weights: &self.subarray_weights,
        }
        .response(dir)
    }
}

/// Total composite pattern evaluated from the flattened array.
#[derive(Debug, Clone)]
pub struct CompositePattern {
    pub array: SensorArray,
    pub weights: WeightVector,
    pub ctx: CarrierContext,
}

impl CompositePattern {
    pub fn new(comp: &CompositeArray, ctx: &CarrierContext) -> Self {
        let (array, weights) = comp.flatten();
        Self {
            array,
            weights,
            ctx: *ctx,
        }
    }
}

impl PatternSource for CompositePattern {
    fn response(&self, dir: &Direction) -> Complex64 {
        WeightedArray {
            array: &self.array,
            ctx: &self.ctx,
            weights: &self.weights,
        }
        .response(dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeMetrics {
    pub directivity_db: f64,
    pub gamma_db: f64,
}

/// Directivity and REIN of the flattened composite.
pub fn composite_metrics(
    comp: &CompositeArray,
    ctx: &CarrierContext,
    look: &Direction,
    quad: &QuadratureSpec,
    exec: Execution,
) -> Result<CompositeMetrics> {
    let (array, w) = comp.flatten();
    let mats = DirectivityMatrices::build_with(&array, ctx, look, quad, exec)?;
    Ok(CompositeMetrics {
        directivity_db: directivity(&w, &mats)?.db,
        gamma_db: rein(&w, &mats.a)?.db,
    })
}
