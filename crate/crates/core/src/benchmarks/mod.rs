//! Benchmark registry: fifteen synthetic and engineering problems with their
//! domains, reporting reference points and known hypervolume ceilings.

pub mod real_world;
pub mod synthetic;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::{Bounds, ObjectiveVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Dtlz1,
    Dtlz2,
    Dtlz3,
    BraninCurrin,
    ChankongHaimes,
    Gmm,
    Poloni,
    SchafferN1,
    SchafferN2,
    TestFunction4,
    ToyRobust,
    Kursawe,
    Penicillin,
    CarSideImpact,
    VehicleSafety,
}

/// Static description of a benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub d: usize,
    pub m: usize,
    pub domain: Bounds,
    /// Reporting reference point on raw objectives.
    pub reference_point: Vec<f64>,
    pub max_hv: Option<f64>,
    pub variable_names: Vec<String>,
    /// Problem context injected into context-variant prompts.
    pub description: Option<&'static str>,
}

const DTLZ_DIM: usize = 6;
const DTLZ_OBJECTIVES: usize = 2;
/// Per-coordinate variance of the multiplicative input noise.
const GMM_NOISE_VARIANCE: f64 = 0.07;

const VEHICLE_SAFETY_CONTEXT: &str = "Your task is to optimize the design of a vehicle for frontal crash safety by adjusting the material thickness of five key structural components. You will generate a configuration for: x0, the bumper beam that absorbs initial impact; x1, the crash box designed to crush progressively; x2, the main longitudinal rails that channel energy; x3, the A-pillar that protects the cabin integrity; and x4, the dash panel that prevents intrusion into the legroom area. The performance of your design will be evaluated against three competing objectives to be minimized: F1 is the total vehicle mass, F2 is the chest injury criterion, and F3 is the toe board intrusion. Your goal is to propose designs that find the best trade-off between minimizing weight, occupant injury, and structural deformation.";

const CAR_SIDE_IMPACT_CONTEXT: &str = "Your task is to propose optimal designs for a vehicle to improve its safety in a side-impact collision. You will generate a configuration of seven input variables representing the thickness of key structural components: x0 (B-Pillar inner), x1 (B-Pillar reinforcement), x2 (floor side inner), x3 (cross-member), x4 (door beam), x5 (door beltline reinforcement), and x6 (roof rail). The performance of your design will be judged on four objectives, all of which should be minimized: F1 is the vehicle's total weight, F2 is the injury load on the occupant's abdomen, F3 is the intrusion velocity at key points, and F4 is a penalty for any constraint violations. Your goal is to find designs that represent the best possible trade-offs across these competing safety and engineering metrics.";

const PENICILLIN_CONTEXT: &str = "Your task is to find the optimal settings for a simulated fed-batch penicillin production process. You will generate a configuration of seven input control parameters that define the initial conditions and operation of the fermenter. These parameters are: x0, the culture medium volume; x1, the biomass concentration; x2, the operating temperature; x3, the glucose substrate concentration; x4, the substrate feed rate; x5, the substrate feed concentration; and x6, the H+ concentration (acidity). The success of your configuration is evaluated on three metrics in a multi-objective optimization context, all of which are to be minimized. F1 represents the negative final penicillin yield, F2 is the total production time, and F3 is the total CO2 emission byproduct. Your goal is to propose configurations that find the best trade-offs by minimizing all three competing objectives.";

impl Benchmark {
    pub const ALL: [Benchmark; 15] = [
        Benchmark::Dtlz1,
        Benchmark::Dtlz2,
        Benchmark::Dtlz3,
        Benchmark::BraninCurrin,
        Benchmark::ChankongHaimes,
        Benchmark::Gmm,
        Benchmark::Poloni,
        Benchmark::SchafferN1,
        Benchmark::SchafferN2,
        Benchmark::TestFunction4,
        Benchmark::ToyRobust,
        Benchmark::Kursawe,
        Benchmark::Penicillin,
        Benchmark::CarSideImpact,
        Benchmark::VehicleSafety,
    ];

    /// Canonical snake_case name used on the command line and in run records.
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Dtlz1 => "dtlz1",
            Benchmark::Dtlz2 => "dtlz2",
            Benchmark::Dtlz3 => "dtlz3",
            Benchmark::BraninCurrin => "branin_currin",
            Benchmark::ChankongHaimes => "chankong_haimes",
            Benchmark::Gmm => "gmm",
            Benchmark::Poloni => "poloni",
            Benchmark::SchafferN1 => "schaffer_n1",
            Benchmark::SchafferN2 => "schaffer_n2",
            Benchmark::TestFunction4 => "test_function4",
            Benchmark::ToyRobust => "toy_robust",
            Benchmark::Kursawe => "kursawe",
            Benchmark::Penicillin => "penicillin",
            Benchmark::CarSideImpact => "car_side_impact",
            Benchmark::VehicleSafety => "vehicle_safety",
        }
    }

    /// Looks a benchmark up by name, ignoring case, `_` and `-`
    /// (`SchafferN1`, `schaffer-n1` and `schaffer_n1` all match).
    pub fn from_name(name: &str) -> Result<Self> {
        let squash = |s: &str| {
            s.chars()
                .filter(|c| c.is_ascii_alphanumeric())
                .collect::<String>()
                .to_ascii_lowercase()
        };
        let wanted = squash(name);
        Self::ALL
            .into_iter()
            .find(|b| squash(b.name()) == wanted)
            .ok_or_else(|| Error::UnknownBenchmark(name.to_string()))
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Benchmark::Gmm)
    }

    pub fn spec(self) -> BenchmarkSpec {
        let (lower, upper): (Vec<f64>, Vec<f64>) = match self {
            Benchmark::Dtlz1 | Benchmark::Dtlz2 | Benchmark::Dtlz3 => {
                (vec![0.0; DTLZ_DIM], vec![1.0; DTLZ_DIM])
            }
            Benchmark::BraninCurrin | Benchmark::Gmm => (vec![0.0; 2], vec![1.0; 2]),
            Benchmark::ChankongHaimes => (vec![-20.0; 2], vec![20.0; 2]),
            Benchmark::Poloni => (vec![-PI; 2], vec![PI; 2]),
            Benchmark::SchafferN1 => (vec![-10.0], vec![10.0]),
            Benchmark::SchafferN2 => (vec![-5.0], vec![10.0]),
            Benchmark::TestFunction4 => (vec![-7.0; 2], vec![4.0; 2]),
            Benchmark::ToyRobust => (vec![0.0], vec![0.7]),
            Benchmark::Kursawe => (vec![-5.0; 3], vec![5.0; 3]),
            Benchmark::Penicillin => (
                vec![60.0, 0.05, 293.0, 0.05, 0.01, 500.0, 5.0],
                vec![120.0, 18.0, 303.0, 18.0, 0.5, 700.0, 6.5],
            ),
            Benchmark::CarSideImpact => (
                vec![0.5, 0.45, 0.5, 0.5, 0.875, 0.4, 0.4],
                vec![1.5, 1.35, 1.5, 1.5, 2.625, 1.2, 1.2],
            ),
            Benchmark::VehicleSafety => (vec![1.0; 5], vec![3.0; 5]),
        };
        let reference_point = match self {
            Benchmark::Dtlz1 => vec![510.57419, 528.80469],
            Benchmark::Dtlz2 => vec![2.2725, 2.2725],
            Benchmark::Dtlz3 => vec![1109.84052, 1109.84052],
            Benchmark::BraninCurrin => vec![311.21029, 13.91174],
            Benchmark::ChankongHaimes => vec![936.27, 180.3557],
            Benchmark::Gmm => vec![0.0, 0.0],
            Benchmark::Poloni => vec![62.2463, 52.57454],
            Benchmark::SchafferN1 => vec![101.0, 145.44],
            Benchmark::SchafferN2 => vec![6.06, 101.0],
            Benchmark::TestFunction4 => vec![56.56, 9.595],
            Benchmark::ToyRobust => vec![49.995, 37.36394],
            Benchmark::Kursawe => vec![-4.91062, 24.01174],
            Benchmark::Penicillin => vec![25.935, 57.612, 935.5],
            Benchmark::CarSideImpact => vec![45.4872, 4.5114, 13.3394, 10.3942],
            Benchmark::VehicleSafety => vec![1864.72022, 11.81993945, 0.2903999384],
        };
        let max_hv = match self {
            Benchmark::Penicillin => Some(2183455.909507436),
            Benchmark::CarSideImpact => Some(484.72654347642793),
            Benchmark::VehicleSafety => Some(246.81607081187002),
            _ => None,
        };
        let description = match self {
            Benchmark::Penicillin => Some(PENICILLIN_CONTEXT),
            Benchmark::CarSideImpact => Some(CAR_SIDE_IMPACT_CONTEXT),
            Benchmark::VehicleSafety => Some(VEHICLE_SAFETY_CONTEXT),
            _ => None,
        };
        let d = lower.len();
        let variable_names = match (self, d) {
            (_, 1) => vec!["x".to_string()],
            (Benchmark::Poloni | Benchmark::ChankongHaimes | Benchmark::TestFunction4, _) => {
                vec!["x".to_string(), "y".to_string()]
            }
            _ => (0..d).map(|i| format!("x{i}")).collect(),
        };
        BenchmarkSpec {
            name: self.name(),
            d,
            m: reference_point.len(),
            domain: Bounds::domain(lower, upper).expect("registered domains are valid"),
            reference_point,
            max_hv,
            variable_names,
            description,
        }
    }

    /// Objective values at `x`. Only the GMM problem draws from `rng`.
    pub fn evaluate<R: Rng + ?Sized>(self, x: &[f64], rng: &mut R) -> Result<ObjectiveVector> {
        let spec = self.spec();
        if !spec.domain.contains(x) {
            return Err(Error::OutOfDomain { point: x.to_vec() });
        }
        if self == Benchmark::Gmm {
            let noise = Normal::new(1.0, GMM_NOISE_VARIANCE.sqrt()).expect("valid noise scale");
            let perturbed: Vec<f64> = x.iter().map(|&v| v * noise.sample(rng)).collect();
            return Ok(ObjectiveVector(synthetic::gmm(&perturbed)));
        }
        self.evaluate_noiseless(x)
    }

    /// Objective values with any input noise switched off.
    pub fn evaluate_noiseless(self, x: &[f64]) -> Result<ObjectiveVector> {
        let spec = self.spec();
        if !spec.domain.contains(x) {
            return Err(Error::OutOfDomain { point: x.to_vec() });
        }
        let y = match self {
            Benchmark::Dtlz1 => synthetic::dtlz1(x, DTLZ_OBJECTIVES),
            Benchmark::Dtlz2 => synthetic::dtlz2(x, DTLZ_OBJECTIVES),
            Benchmark::Dtlz3 => synthetic::dtlz3(x, DTLZ_OBJECTIVES),
            Benchmark::BraninCurrin => synthetic::branin_currin(x),
            Benchmark::ChankongHaimes => synthetic::chankong_haimes(x),
            Benchmark::Gmm => synthetic::gmm(x),
            Benchmark::Poloni => synthetic::poloni(x),
            Benchmark::SchafferN1 => synthetic::schaffer_n1(x),
            Benchmark::SchafferN2 => synthetic::schaffer_n2(x),
            Benchmark::TestFunction4 => synthetic::test_function4(x),
            Benchmark::ToyRobust => synthetic::toy_robust(x),
            Benchmark::Kursawe => synthetic::kursawe(x),
            Benchmark::Penicillin => real_world::penicillin(x),
            Benchmark::CarSideImpact => real_world::car_side_impact(x),
            Benchmark::VehicleSafety => real_world::vehicle_safety(x),
        };
        Ok(ObjectiveVector(y))
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Benchmark::from_name(s)
    }
}

/// Convenience lookup by name.
pub fn spec(name: &str) -> Result<BenchmarkSpec> {
    Ok(Benchmark::from_name(name)?.spec())
}
