//! Hand-traced ledgers: each case lists the exact comparisons every feedback adds.

use crashpbo::Duel;
use crashpbo::{DuelFeedback, FeedbackLedger, Preference};

use super::Outcome;

pub struct Trace {
    pub name: &'static str,
    pub initial: Vec<DuelFeedback>,
    pub initial_added: Vec<Duel>,
    pub steps: Vec<(DuelFeedback, Vec<Duel>)>,
}

const OK: bool = true;
const CRASH: bool = false;

fn fb(a: f64, s_a: bool, b: f64, s_b: bool, pi: Option<u8>) -> DuelFeedback {
    let pi = pi.map(|p| if p == 0 { Preference::First } else { Preference::Second });
    DuelFeedback::new(vec![a], vec![b], s_a, s_b, pi).expect("valid feedback")
}

/// `(x_a, x_b, pi)`; pi = 1 ranks `x_b` above `x_a`.
fn d(a: f64, b: f64, pi: u8) -> Duel {
    Duel::new(vec![a], vec![b], if pi == 0 { Preference::First } else { Preference::Second })
}

/// X_s = [0.1, 0.3, 0.4], X_c = [0.2] after these two feedbacks.
fn three_feasible_one_crashed() -> (Vec<DuelFeedback>, Vec<Duel>, DuelFeedback, Vec<Duel>) {
    (
        vec![fb(0.1, OK, 0.2, CRASH, None)],
        vec![d(0.2, 0.1, 1)],
        fb(0.3, OK, 0.4, OK, Some(0)),
        vec![d(0.3, 0.2, 0), d(0.4, 0.2, 0), d(0.3, 0.4, 0)],
    )
}

pub fn traces() -> Vec<Trace> {
    let mut out = vec![
        Trace {
            name: "crashed experiment ranked below every successful one",
            initial: vec![fb(0.0, OK, 0.2, OK, Some(0))],
            initial_added: vec![d(0.0, 0.2, 0)],
            steps: vec![
                (fb(0.5, OK, 0.4, OK, Some(0)), vec![d(0.5, 0.4, 0)]),
                (
                    fb(0.5, OK, 0.6, CRASH, None),
                    vec![d(0.6, 0.0, 1), d(0.6, 0.2, 1), d(0.6, 0.5, 1), d(0.6, 0.4, 1)],
                ),
            ],
        },
        Trace {
            name: "initial duel, first point crashed",
            initial: vec![fb(0.1, CRASH, 0.9, OK, None)],
            initial_added: vec![d(0.9, 0.1, 0)],
            steps: vec![],
        },
        Trace {
            name: "initial duel, second point crashed",
            initial: vec![fb(0.1, OK, 0.9, CRASH, None)],
            initial_added: vec![d(0.9, 0.1, 1)],
            steps: vec![],
        },
        Trace {
            name: "both crashed with two known feasible points",
            initial: vec![fb(0.2, OK, 0.8, OK, Some(1))],
            initial_added: vec![d(0.2, 0.8, 1)],
            steps: vec![(
                fb(0.3, CRASH, 0.4, CRASH, None),
                vec![d(0.3, 0.2, 1), d(0.3, 0.8, 1), d(0.4, 0.2, 1), d(0.4, 0.8, 1)],
            )],
        },
        Trace {
            name: "both feasible with two known crashes",
            initial: vec![fb(0.5, OK, 0.1, CRASH, None)],
            initial_added: vec![d(0.1, 0.5, 1)],
            steps: vec![
                (fb(0.5, OK, 0.2, CRASH, None), vec![d(0.5, 0.1, 0), d(0.2, 0.5, 1)]),
                (
                    fb(0.7, OK, 0.8, OK, Some(1)),
                    vec![d(0.7, 0.1, 0), d(0.7, 0.2, 0), d(0.8, 0.1, 0), d(0.8, 0.2, 0), d(0.7, 0.8, 1)],
                ),
            ],
        },
        Trace {
            name: "no crashes known, plain comparison only",
            initial: vec![fb(0.3, OK, 0.6, OK, Some(1))],
            initial_added: vec![d(0.3, 0.6, 1)],
            steps: vec![(fb(0.9, OK, 0.6, OK, Some(0)), vec![d(0.9, 0.6, 0)])],
        },
        Trace {
            name: "re-reported feasible anchor regenerates its virtual comparisons",
            initial: vec![fb(0.4, OK, 0.9, CRASH, None)],
            initial_added: vec![d(0.9, 0.4, 1)],
            steps: vec![(
                fb(0.5, OK, 0.4, OK, Some(0)),
                vec![d(0.5, 0.9, 0), d(0.4, 0.9, 0), d(0.5, 0.4, 0)],
            )],
        },
        Trace {
            name: "new crash against the feasible anchor",
            initial: vec![fb(0.4, OK, 0.9, CRASH, None)],
            initial_added: vec![d(0.9, 0.4, 1)],
            steps: vec![(
                fb(0.6, CRASH, 0.4, OK, None),
                vec![d(0.6, 0.4, 1), d(0.4, 0.9, 0), d(0.4, 0.6, 0)],
            )],
        },
        Trace {
            name: "re-reported crash against a new feasible point",
            initial: vec![fb(0.4, OK, 0.9, CRASH, None)],
            initial_added: vec![d(0.9, 0.4, 1)],
            steps: vec![(fb(0.9, CRASH, 0.2, OK, None), vec![d(0.9, 0.4, 1), d(0.2, 0.9, 0)])],
        },
        Trace {
            name: "initial set whose first duel crashed entirely",
            initial: vec![fb(0.1, CRASH, 0.2, CRASH, None), fb(0.3, OK, 0.4, OK, Some(1))],
            initial_added: vec![
                d(0.3, 0.1, 0),
                d(0.3, 0.2, 0),
                d(0.4, 0.1, 0),
                d(0.4, 0.2, 0),
                d(0.3, 0.4, 1),
            ],
            steps: vec![],
        },
    ];

    let (initial, initial_added, second, second_added) = three_feasible_one_crashed();
    out.push(Trace {
        name: "second point crashed with |X_s| = 3, |X_c| = 1",
        initial: initial.clone(),
        initial_added: initial_added.clone(),
        steps: vec![
            (second.clone(), second_added.clone()),
            (
                fb(0.5, OK, 0.6, CRASH, None),
                vec![d(0.5, 0.2, 0), d(0.6, 0.1, 1), d(0.6, 0.3, 1), d(0.6, 0.4, 1), d(0.6, 0.5, 1)],
            ),
        ],
    });
    out.push(Trace {
        name: "first point crashed with |X_s| = 3, |X_c| = 1",
        initial,
        initial_added,
        steps: vec![
            (second, second_added),
            (
                fb(0.6, CRASH, 0.5, OK, None),
                vec![d(0.6, 0.1, 1), d(0.6, 0.3, 1), d(0.6, 0.4, 1), d(0.5, 0.2, 0), d(0.5, 0.6, 0)],
            ),
        ],
    });
    out
}

/// Replays one trace, returning a description of the first mismatch.
pub fn check(trace: &Trace) -> Result<(), String> {
    let (added, mut ledger) =
        FeedbackLedger::initialize(&trace.initial).map_err(|e| format!("initialize: {e}"))?;
    if added != trace.initial_added {
        return Err(format!("initial: got {added:?}, expected {:?}", trace.initial_added));
    }
    for (k, (feedback, expected)) in trace.steps.iter().enumerate() {
        let added = ledger.apply(feedback).map_err(|e| format!("step {k}: {e}"))?;
        if &added != expected {
            return Err(format!("step {k}: got {added:?}, expected {expected:?}"));
        }
    }
    Ok(())
}

pub fn run() -> Outcome {
    let all = traces();
    let failures: Vec<String> =
        all.iter().filter_map(|t| check(t).err().map(|e| format!("{}: {e}", t.name))).collect();
    if failures.is_empty() {
        Outcome::new(all.len() == 12, format!("{} ledgers reproduced exactly", all.len()))
    } else {
        Outcome::fail(failures.join("; "))
    }
}
