//! Generated positive-existential sentences and the cross-check of both
//! evaluators through the translation.

use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hyperval_core::hyperfield::Hyperfield;

use crate::ast::{Binder, Formula, Sort, VhfAtom, VhfFormula, VhfTerm};
use crate::error::{Error, Result};
use crate::eval::{eval_val, eval_vhf, EvalConfig, TriBool};
use crate::translate::translate;

pub const CORPUS_SEED: u64 = 0x5eed_0001;

fn random_term(rng: &mut ChaCha8Rng, vars: &[&str]) -> VhfTerm {
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..6) {
        0 => VhfTerm::Zero,
        1 => VhfTerm::One,
        2 => VhfTerm::PHat,
        _ => VhfTerm::Var(vars.choose(rng).expect("at least one variable").to_string()),
    };
    match rng.gen_range(0..5) {
        0 => VhfTerm::mul(leaf(rng), leaf(rng)),
        1 => VhfTerm::Pow(Box::new(leaf(rng)), 2),
        _ => leaf(rng),
    }
}

fn random_atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> VhfFormula {
    let kind = rng.gen_range(0..3);
    let mut t = || random_term(rng, vars);
    let atom = match kind {
        0 => VhfAtom::Plus(t(), t(), t()),
        1 => VhfAtom::Divides(t(), t()),
        _ => VhfAtom::Eq(t(), t()),
    };
    Formula::Atom(atom)
}

/// `count` closed positive-existential sentences with one or two bound
/// variables and one to three atoms, reproducible from `seed`.
pub fn generate_corpus(count: usize, seed: u64) -> Vec<VhfFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let vars: &[&str] = if rng.gen_bool(0.5) { &["x"] } else { &["x", "y"] };
            let atoms: Vec<VhfFormula> = (0..rng.gen_range(1..=3)).map(|_| random_atom(&mut rng, vars)).collect();
            let body = match atoms.len() {
                1 => atoms.into_iter().next().expect("one atom"),
                _ if rng.gen_bool(0.6) => Formula::And(atoms),
                _ => Formula::Or(atoms),
            };
            Formula::Exists(vars.iter().map(|v| Binder::new(*v, Sort::H)).collect(), Box::new(body))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct AgreementRow {
    pub sentence: String,
    pub translation_existential: bool,
    pub vhf: TriBool,
    pub val: TriBool,
}

impl AgreementRow {
    /// Both sides definite and different.
    pub fn disagrees(&self) -> bool {
        self.vhf.is_definite() && self.val.is_definite() && self.vhf.is_true() != self.val.is_true()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sentence": self.sentence,
            "translation_existential": self.translation_existential,
            "vhf": self.vhf.to_json(),
            "val": self.val.to_json(),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct AgreementReport {
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| r.disagrees()).count()
    }

    pub fn definite_agreements(&self) -> usize {
        self.rows.iter().filter(|r| r.vhf.is_definite() && r.val.is_definite() && !r.disagrees()).count()
    }

    pub fn all_existential(&self) -> bool {
        self.rows.iter().all(|r| r.translation_existential)
    }

    /// The first definite disagreement as an error.
    pub fn check(&self) -> Result<()> {
        match self.rows.iter().find(|r| r.disagrees()) {
            Some(r) => Err(Error::TranslationDisagreement {
                sentence: r.sentence.clone(),
                detail: format!("hyperfield side {}, field side {}", r.vhf.to_json(), r.val.to_json()),
            }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sentences": self.rows.len(),
            "disagreements": self.disagreements(),
            "definite_agreements": self.definite_agreements(),
            "all_translations_existential": self.all_existential(),
            "rows": self.rows.iter().map(AgreementRow::to_json).collect::<Vec<_>>(),
        })
    }
}

fn compare(phi: &VhfFormula, h: &Hyperfield, cfg: &EvalConfig) -> Result<AgreementRow> {
    if !phi.is_positive_existential() {
        return Err(Error::InvalidInput(format!("{phi} is not positive existential")));
    }
    let e = u32::try_from(h.field().e()).expect("small ramification index");
    let tilde = translate(phi, e, h.level());
    Ok(AgreementRow {
        sentence: phi.to_string(),
        translation_existential: tilde.is_existential(),
        vhf: eval_vhf(phi, h, cfg)?.result,
        val: eval_val(&tilde, h, cfg)?.result,
    })
}

/// Evaluates each sentence on H_{ν,n} and its translation on (K, ν), one
/// sentence per task on `threads` workers. Rows keep corpus order.
pub fn agreement_harness(corpus: &[VhfFormula], h: &Hyperfield, cfg: &EvalConfig, threads: usize) -> Result<AgreementReport> {
    let next = Mutex::new(0usize);
    let slots: Vec<Mutex<Option<Result<AgreementRow>>>> = corpus.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads.max(1).min(corpus.len().max(1)) {
            s.spawn(|| loop {
                let i = {
                    let mut g = next.lock().expect("poisoned");
                    let i = *g;
                    *g += 1;
                    i
                };
                let Some(phi) = corpus.get(i) else { break };
                *slots[i].lock().expect("poisoned") = Some(compare(phi, h, cfg));
            });
        }
    });
    let rows = slots
        .into_iter()
        .map(|m| m.into_inner().expect("poisoned").expect("every slot filled"))
        .collect::<Result<Vec<_>>>()?;
    Ok(AgreementReport { rows })
}
