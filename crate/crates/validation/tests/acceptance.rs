//! Runs every study and prints one line per criterion. Exits non-zero when
//! any line fails.

use std::io::Write;
use std::process::ExitCode;

use ceda_validation::{criteria, reference, timed, Outcome};

fn main() -> ExitCode {
    let studies: [(&str, fn() -> Outcome); 12] = [
        ("1", criteria::gaussian_oracle),
        ("2", criteria::example1_reproduction),
        ("3", criteria::scale_relation),
        ("4", criteria::example2star_discrimination),
        ("5", criteria::example3_grid),
        ("6", criteria::example4_protocol),
        ("7", criteria::example5_curse_escape),
        ("8", criteria::example6_structure),
        ("9", criteria::property_suites),
        ("R1", reference::mixture_information),
        ("R2", reference::example5_fused_entropy),
        ("R3", reference::example6_fused_entropy),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();

    let mut failed = Vec::new();
    let mut ran = 0;
    for (id, study) in studies {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let outcome = timed(study);
        ran += 1;
        println!("{outcome}");
        let _ = std::io::stdout().flush();
        if !outcome.passed {
            failed.push(outcome.id);
        }
    }
    println!("\nacceptance: {} of {ran} passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
