#![allow(clippy::approx_constant)]

use mohollm::{Benchmark, Bounds, DecisionVector, ObjectiveVector, Observation};
use mohollm_llm::prompt::DEFAULT_ICL_CAP;
use mohollm_llm::{PromptBuilder, Variant};

const SAMPLER: &str = include_str!("golden/poloni_sampler.txt");
const SURROGATE: &str = include_str!("golden/poloni_surrogate.txt");

/// The nine evaluated configurations shown in the reference prompts.
fn history() -> Vec<Observation> {
    let rows: [([f64; 2], [f64; 2]); 9] = [
        ([-3.142, -0.725], [13.327, 0.096]),
        ([-3.142, -0.706], [13.178, 0.107]),
        ([-3.142, -0.162], [7.839, 0.722]),
        ([0.975, 1.681], [1.18, 22.988]),
        ([-3.142, -0.82], [14.006, 0.053]),
        ([-3.142, 0.494], [2.616, 2.252]),
        ([-3.142, 0.017], [6.028, 1.054]),
        ([-3.142, -0.231], [8.566, 0.612]),
        ([-3.142, -0.392], [10.257, 0.39]),
    ];
    rows.iter()
        .map(|(x, y)| Observation {
            x: DecisionVector(x.to_vec()),
            y: ObjectiveVector(y.to_vec()),
            trial_index: 0,
        })
        .collect()
}

fn builder(variant: Variant) -> PromptBuilder {
    PromptBuilder::new(&Benchmark::Poloni.spec(), variant, None, DEFAULT_ICL_CAP).unwrap()
}

#[test]
fn poloni_sampler_prompt_is_byte_identical() {
    let region = Bounds::new(vec![-3.142, 0.274], vec![-1.067, 3.142]).unwrap();
    for variant in [Variant::Context, Variant::NoContext] {
        let prompt = builder(variant)
            .sampler_prompt(&region, &history(), 5)
            .unwrap();
        assert_eq!(prompt, SAMPLER, "{variant}");
    }
}

#[test]
fn poloni_surrogate_prompt_is_byte_identical() {
    let pool: Vec<DecisionVector> = [
        [-2.742, 0.474],
        [-2.342, 0.674],
        [-2.542, 0.574],
        [-2.942, 0.374],
        [-2.142, 0.774],
    ]
    .iter()
    .map(|x| DecisionVector(x.to_vec()))
    .collect();
    for variant in [Variant::Context, Variant::NoContext] {
        let prompt = builder(variant)
            .surrogate_prompt(&pool, &history())
            .unwrap();
        assert_eq!(prompt, SURROGATE, "{variant}");
    }
}
