//! Seeded replications of Monte Carlo estimates against exact DP values.

use greenwalk_core::greens::{first_passage, WalkSpec};
use greenwalk_core::measure::Law;
use greenwalk_core::montecarlo::{estimate_event, Event, SimulationConfig};

fn coverage(walk: &WalkSpec, start: i64, event: Event, horizon: usize, exact: f64) -> usize {
    (0..100u64)
        .filter(|&seed| {
            let e = estimate_event(&SimulationConfig {
                walk: walk.clone(),
                start,
                trials: 2000,
                horizon,
                seed: 1000 + seed,
                event,
            })
            .unwrap();
            e.covers(exact)
        })
        .count()
}

#[test]
fn three_sigma_intervals_cover_exact_values() {
    let srw = WalkSpec::homogeneous(Law::points(&[(-1, 0.5), (1, 0.5)]).unwrap()).unwrap();
    let drift = WalkSpec::homogeneous(Law::points(&[(-1, 0.3), (1, 0.5), (2, 0.2)]).unwrap()).unwrap();
    let osc = WalkSpec::oscillating(
        Law::points(&[(-1, 0.4), (2, 0.6)]).unwrap(),
        Law::points(&[(-2, 0.5), (1, 0.5)]).unwrap(),
    )
    .unwrap();
    let cases = [
        (&srw, 0, Event::Return, 60),
        (&srw, 0, Event::Hit { y: 3 }, 40),
        (&drift, 0, Event::Hit { y: -2 }, 80),
        (&osc, 0, Event::Return, 50),
        (&osc, 2, Event::Hit { y: -1 }, 50),
    ];
    for (walk, start, event, horizon) in cases {
        let y = match event {
            Event::Hit { y } => y,
            _ => start,
        };
        let exact = first_passage(walk, start, y, horizon).unwrap().hit_probability();
        let hits = coverage(walk, start, event, horizon, exact);
        assert!(hits >= 99, "{event:?} from {start}: {hits}/100 intervals cover {exact}");
    }
}
