//! Whole-grid properties of the two sweep models.

use std::sync::OnceLock;

use nsea_core::freq_response::{default_frequencies, sweep, FreqResponseGrid, Model, SweepSettings, DEFAULT_AMPLITUDES};
use nsea_core::linear_sea::ActuatorParams;
use nsea_core::nsee::NseeGeometry;

fn grid(model: Model) -> &'static FreqResponseGrid {
    static PHYSICAL: OnceLock<FreqResponseGrid> = OnceLock::new();
    static DF: OnceLock<FreqResponseGrid> = OnceLock::new();
    let cell = match model {
        Model::Physical => &PHYSICAL,
        Model::DescribingFunction => &DF,
    };
    cell.get_or_init(|| {
        sweep(
            &ActuatorParams::reference(),
            &NseeGeometry::reference(),
            model,
            &DEFAULT_AMPLITUDES,
            &default_frequencies(),
            &SweepSettings::default(),
        )
        .unwrap()
    })
}

const MODELS: [Model; 2] = [Model::Physical, Model::DescribingFunction];

#[test]
fn unit_gain_at_one_hertz() {
    for model in MODELS {
        for row in grid(model).rows() {
            let g = row[0].gain;
            assert_eq!(row[0].frequency, 1.0);
            assert!((0.9..=1.1).contains(&g), "{model} ±{} N·m: {g}", row[0].amplitude);
        }
    }
}

#[test]
fn bandwidth_grows_with_amplitude() {
    for model in MODELS {
        let crossings: Vec<f64> = grid(model).zero_crossings().iter().map(|c| c.unwrap()).collect();
        assert!(crossings.windows(2).all(|w| w[1] > w[0]), "{model}: {crossings:?}");
        assert!(crossings[7] - crossings[0] >= 10.0, "{model}: {crossings:?}");
    }
}

#[test]
fn physical_gain_stays_down_after_collapse() {
    for row in grid(Model::Physical).rows() {
        if let Some(first_low) = row.iter().position(|p| p.gain < 0.5) {
            assert!(
                row[first_low..].iter().all(|p| p.gain <= 1.0),
                "±{} N·m recovers after {} Hz",
                row[0].amplitude,
                row[first_low].frequency
            );
        }
    }
}

#[test]
fn sweeps_are_bit_reproducible() {
    let again = sweep(
        &ActuatorParams::reference(),
        &NseeGeometry::reference(),
        Model::Physical,
        &DEFAULT_AMPLITUDES,
        &default_frequencies(),
        &SweepSettings::default(),
    )
    .unwrap();
    assert_eq!(&again, grid(Model::Physical));
}
