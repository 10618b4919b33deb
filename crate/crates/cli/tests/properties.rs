use proptest::prelude::*;
use tetrad_audit::Chart;
use tetrad_audit_cli::config::parse_point;
use tetrad_audit_cli::{GridSpec, TetradSpec};

fn tetrad_spec() -> impl Strategy<Value = TetradSpec> {
    prop_oneof![
        Just(TetradSpec::Diag),
        ((0usize..4, 0usize..4), -10.0..10.0f64, 0usize..4)
            .prop_filter("distinct plane", |((a, b), _, _)| a != b)
            .prop_map(|((a, b), coeff, coord)| TetradSpec::Boost {
                plane: (a.min(b), a.max(b)),
                coeff,
                coord,
            }),
    ]
}

proptest! {
    #[test]
    fn tetrad_spec_display_parses_back(spec in tetrad_spec()) {
        let back: TetradSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn point_display_parses_back(x in proptest::array::uniform4(-1e6..1e6f64)) {
        let text = format!("{},{},{},{}", x[0], x[1], x[2], x[3]);
        prop_assert_eq!(parse_point(&text).unwrap(), x);
    }

    #[test]
    fn grid_points_are_ordered_products(
        axes in proptest::sample::subsequence(vec![0usize, 1, 2, 3], 1..=3),
        ranges in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 1usize..5), 3),
    ) {
        let text: Vec<String> = axes
            .iter()
            .zip(&ranges)
            .map(|(c, (a, b, n))| format!("x{c}={a}:{b}:{n}"))
            .collect();
        let grid = GridSpec::parse(&text.join(","), Chart::Cartesian).unwrap();
        let points = grid.points();
        let expected: usize = ranges.iter().take(axes.len()).map(|r| r.2).product();
        prop_assert_eq!(points.len(), expected);
        prop_assert_eq!(grid.len(), expected);

        let (first, last) = (points[0], points[points.len() - 1]);
        for (c, (a, b, n)) in axes.iter().zip(&ranges) {
            prop_assert_eq!(first[*c], *a);
            // a single sample sits at the start
            prop_assert_eq!(last[*c], if *n == 1 { *a } else { *b });
        }
        for c in (0..4).filter(|c| !axes.contains(c)) {
            prop_assert!(points.iter().all(|p| p[c] == 0.0));
        }
        // the last listed axis varies fastest
        let (c, n) = (axes[axes.len() - 1], ranges[axes.len() - 1].2);
        if n > 1 {
            prop_assert_eq!(points[1][c], grid.axes[axes.len() - 1].values()[1]);
        }
    }
}
