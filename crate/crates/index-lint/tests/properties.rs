use std::collections::BTreeSet;

use index_lint::{check_indices, free_indices, parse_expr, FreeIndex, Position, Slot, Space, SymbolDecl, SymbolTable};
use proptest::prelude::*;

const LABELS: [&str; 8] = ["a", "b", "c", "d", "mu", "nu", "lam", "sigma"];

/// A legal product: each label used once (free) or twice with opposite
/// variance (dummy), spread over factors `F0`, `F1`, ... with `any` slots.
fn legal_product() -> impl Strategy<Value = (SymbolTable, String, Vec<Vec<(String, Position)>>)> {
    (0usize..=4, 0usize..=4)
        .prop_filter("at most 8 labels", |(d, f)| d + f <= LABELS.len() && d + f > 0)
        .prop_flat_map(|(dummies, frees)| {
            (
                Just(LABELS.to_vec()).prop_shuffle(),
                proptest::collection::vec(any::<bool>(), frees),
                Just(dummies),
            )
        })
        .prop_flat_map(|(labels, free_ups, dummies)| {
            let mut occ = Vec::new();
            for l in &labels[..dummies] {
                occ.push((l.to_string(), Position::Upper));
                occ.push((l.to_string(), Position::Lower));
            }
            for (l, up) in labels[dummies..].iter().zip(&free_ups) {
                occ.push((l.to_string(), if *up { Position::Upper } else { Position::Lower }));
            }
            let n = occ.len();
            (Just(occ).prop_shuffle(), proptest::collection::vec(0..n, 0..4))
        })
        .prop_map(|(occ, mut cuts)| {
            cuts.push(0);
            cuts.push(occ.len());
            cuts.sort();
            cuts.dedup();
            let factors: Vec<Vec<(String, Position)>> = cuts.windows(2).map(|w| occ[w[0]..w[1]].to_vec()).collect();
            let mut table = SymbolTable::empty();
            let mut text = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                let name = format!("F{i}");
                let slots: Vec<Slot> = f.iter().map(|(_, p)| Slot::new(*p, Space::Any)).collect();
                table.declare(SymbolDecl::tensor(&name, &slots));
                let idx: String = f.iter().map(|(l, p)| format!("{}{{{l}}}", p.marker())).collect();
                text.push(format!("{name}{idx}"));
            }
            (table, text.join(" "), factors)
        })
}

fn factor_free(f: &[(String, Position)]) -> BTreeSet<FreeIndex> {
    let mut out = BTreeSet::new();
    for (l, p) in f {
        let mine = FreeIndex {
            label: l.clone(),
            position: *p,
        };
        let other = FreeIndex {
            label: l.clone(),
            position: p.flipped(),
        };
        if !out.remove(&other) {
            out.insert(mine);
        }
    }
    out
}

proptest! {
    #[test]
    fn product_free_set_is_variance_symmetric_difference((table, text, factors) in legal_product()) {
        let e = parse_expr(&text, &table).unwrap();
        prop_assert!(check_indices(&e).is_empty(), "{}", text);
        let mut expected = BTreeSet::new();
        for f in &factors {
            for x in factor_free(f) {
                let partner = FreeIndex { label: x.label.clone(), position: x.position.flipped() };
                if !expected.remove(&partner) {
                    expected.insert(x);
                }
            }
        }
        let got: BTreeSet<FreeIndex> = free_indices(&e).into_iter().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn unparse_reparses(src in expression()) {
        let table = SymbolTable::default_table();
        let e = parse_expr(&src, &table).unwrap();
        let printed = e.to_string();
        let again = parse_expr(&printed, &table).unwrap();
        prop_assert!(e.same_structure(&again), "{} -> {}", src, printed);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn arbitrary_text_never_panics(src in "[ -~]{0,80}") {
        let table = SymbolTable::default_table();
        for d in index_lint::lint_expr(&src, &table) {
            prop_assert!(d.span.start <= d.span.end && d.span.end <= src.len());
        }
    }
}

fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("q^a_mu".to_string()),
        Just("q^mu_a".to_string()),
        Just("omega^a_{mu b}".to_string()),
        Just("Gamma^nu_{mu lam}".to_string()),
        Just("g_{mu nu}".to_string()),
        Just("R".to_string()),
        Just("0".to_string()),
        Just("2.5".to_string()),
    ];
    leaf.prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x}) ({y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("{x} + {y}")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x}) - ({y})")),
            inner.clone().prop_map(|x| format!("(-({x}))")),
            inner.clone().prop_map(|x| format!("d_sigma ({x})")),
            inner.clone().prop_map(|x| format!("D^rho ({x})")),
            inner.clone().prop_map(|x| format!("(D^rho d_sigma) ({x})")),
        ]
    })
}
