use super::kernel::{make_blur_kernel, BlurKernel};
use super::kind::{DegradationKind, Family, Modality};
use super::ops::{ContrastStripe, Degradation, Illumination, NoiseBlur, Weather};
use super::params::{DegradationSpec, SideMaps};
use crate::imagekit::Image;
use crate::{Error, Result};

/// Airlight used when a weather operator carries rain but no haze; irrelevant since `t ≡ 1`.
const NEUTRAL_AIRLIGHT: f64 = 0.6;

enum Sensor {
    NoiseBlur(NoiseBlur),
    ContrastStripe(ContrastStripe),
}

#[derive(Default)]
struct Plan {
    gamma: Option<f64>,
    weather: Option<(f64, f64, f64, u64)>,
    sensor: Option<Sensor>,
}

impl Plan {
    fn claim(&mut self, family: Family, spec: &DegradationSpec) -> Result<()> {
        let taken = match family {
            Family::Illumination => self.gamma.is_some(),
            Family::Weather => self.weather.is_some(),
            Family::Sensor => self.sensor.is_some(),
        };
        if taken {
            return Err(Error::invalid(format!(
                "{} modality already has a {family:?} degradation; cannot add {}",
                spec.modality, spec.kind
            )));
        }
        Ok(())
    }

    fn add(&mut self, spec: &DegradationSpec) -> Result<()> {
        use DegradationKind::*;
        spec.validate()?;
        for &family in spec.kind.families() {
            self.claim(family, spec)?;
        }
        let p = spec.resolved_params();
        let missing = |name: &str| Error::invalid(format!("{} is missing `{name}`", spec.kind));
        match spec.kind {
            LowLight | OverExposure => self.gamma = Some(p.gamma.ok_or_else(|| missing("gamma"))?),
            LowLightNoise => {
                self.gamma = Some(p.gamma.ok_or_else(|| missing("gamma"))?);
                self.sensor = Some(Sensor::NoiseBlur(NoiseBlur {
                    kernel: BlurKernel::identity(),
                    sigma: p.sigma.ok_or_else(|| missing("sigma"))?,
                    seed: spec.seed,
                }));
            }
            Rain => {
                let rain = p.rain_intensity.ok_or_else(|| missing("rain_intensity"))?;
                self.weather = Some((0.0, NEUTRAL_AIRLIGHT, rain, spec.seed));
            }
            Haze => {
                let beta = p.beta.ok_or_else(|| missing("beta"))?;
                let a = p.airlight.ok_or_else(|| missing("airlight"))?;
                self.weather = Some((beta, a, 0.0, spec.seed));
            }
            RainHaze => {
                let beta = p.beta.ok_or_else(|| missing("beta"))?;
                let a = p.airlight.ok_or_else(|| missing("airlight"))?;
                let rain = p.rain_intensity.ok_or_else(|| missing("rain_intensity"))?;
                self.weather = Some((beta, a, rain, spec.seed));
            }
            Blur => {
                let n = p.kernel_length.ok_or_else(|| missing("kernel_length"))?;
                let theta = p.kernel_angle.ok_or_else(|| missing("kernel_angle"))?;
                self.sensor = Some(Sensor::NoiseBlur(NoiseBlur {
                    kernel: make_blur_kernel(n, theta)?,
                    sigma: 0.0,
                    seed: spec.seed,
                }));
            }
            GaussNoise | RandomNoise => {
                self.sensor = Some(Sensor::NoiseBlur(NoiseBlur {
                    kernel: BlurKernel::identity(),
                    sigma: p.sigma.ok_or_else(|| missing("sigma"))?,
                    seed: spec.seed,
                }));
            }
            LowContrast | StripeNoise | ContrastStripe => {
                self.sensor = Some(Sensor::ContrastStripe(super::ops::ContrastStripe {
                    alpha: p.alpha.unwrap_or(1.0),
                    epsilon: p.epsilon.unwrap_or(0.0),
                    seed: spec.seed,
                }));
            }
        }
        Ok(())
    }

    fn run(&self, img: &Image, maps: &SideMaps) -> Result<Image> {
        let mut out = img.clone();
        if let Some(gamma) = self.gamma {
            out = Illumination {
                gamma,
                map: maps.illumination.as_ref(),
            }
            .apply(&out)?;
        }
        if let Some((beta, airlight, rain_intensity, seed)) = self.weather {
            out = Weather {
                beta,
                airlight,
                rain_intensity,
                depth: maps.depth.as_ref(),
                seed,
            }
            .apply(&out)?;
        }
        match &self.sensor {
            Some(Sensor::NoiseBlur(op)) => out = op.apply(&out)?,
            Some(Sensor::ContrastStripe(op)) => out = op.apply(&out)?,
            None => {}
        }
        Ok(out)
    }
}

fn plans(specs: &[DegradationSpec]) -> Result<(Plan, Plan)> {
    let mut ir_plan = Plan::default();
    let mut vi_plan = Plan::default();
    for spec in specs {
        match spec.modality {
            Modality::Infrared => ir_plan.add(spec)?,
            Modality::Visible => vi_plan.add(spec)?,
        }
    }
    Ok((ir_plan, vi_plan))
}

/// Checks that `specs` validate and respect the one-operator-per-family rule.
pub fn check_composable(specs: &[DegradationSpec]) -> Result<()> {
    plans(specs).map(|_| ())
}

/// Applies `specs` to a clean infrared/visible pair.
///
/// Per modality the nesting is fixed (illumination → weather → sensor) regardless of list order;
/// each modality carries at most one operator per family. `maps` describe the visible image.
pub fn compose(
    ir: &Image,
    vi: &Image,
    specs: &[DegradationSpec],
    maps: &SideMaps,
) -> Result<(Image, Image)> {
    let (ir_plan, vi_plan) = plans(specs)?;
    maps.validate_for(vi)?;
    let (ir_out, vi_out) = rayon::join(
        || ir_plan.run(ir, &SideMaps::none()),
        || vi_plan.run(vi, maps),
    );
    Ok((ir_out?, vi_out?))
}
