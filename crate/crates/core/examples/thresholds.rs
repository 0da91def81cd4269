//! Threshold below E1 versus below E2 on equidistant schedules.

use num_rational::Ratio;
use rba::study::thresholds::{summarize, threshold_study, ThresholdSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ThresholdSpec {
        ns: vec![5, 6, 7],
        rs: vec![Ratio::from_integer(4), Ratio::from_integer(8)],
        count: 3,
        max_l: 6,
        ..ThresholdSpec::default()
    };
    let (rows, _) = threshold_study(&spec)?;
    println!(
        "{:>3} {:>4} {:>16} {:>3} {:>10} {:>10} {:>10} {:>10}",
        "n", "r", "seed", "L", "p_E1", "p_E2", "tts_E1", "tts_E2"
    );
    for row in rows.iter().filter(|row| row.l <= 3) {
        println!(
            "{:>3} {:>4} {:>16x} {:>3} {:>10.4} {:>10.4} {:>10.2} {:>10.2}",
            row.n,
            row.r.to_string(),
            row.seed,
            row.l,
            row.p_first,
            row.p_second,
            row.tts_first,
            row.tts_second
        );
    }
    let s = summarize(&rows);
    println!(
        "\nbelow E2 lowers the best TTS on {} of {} instances",
        s.second_wins, s.instances
    );
    Ok(())
}
