//! Score a prediction against gold with partial credit from the quantity
//! taxonomy.
//!
//! ```bash
//! cargo run --example score_metrics
//! ```

use quantsem::eval::{aggregate, match_quantities, score_fact, GoldSpec};
use quantsem::frames::{QuantitySign, Sign};
use quantsem::kb::QuantityTaxonomy;

fn main() {
    let mut t = QuantityTaxonomy::new();
    for q in ["Volume", "SpatialQuantity", "Size"] {
        t.add_node(q);
    }
    t.add_partial("Size", "SpatialQuantity").unwrap();

    let gold = GoldSpec::new(
        "When a gas is squeezed into a smaller volume, the particles have less space to move.",
        &[("Volume", Sign::Minus), ("SpatialQuantity", Sign::Minus)],
    );
    let preds = [
        vec![QuantitySign::new("Volume", Sign::Minus), QuantitySign::new("Size", Sign::Minus)],
        vec![QuantitySign::new("Volume", Sign::Plus), QuantitySign::new("Size", Sign::Minus)],
        vec![QuantitySign::new("Size", Sign::Minus)],
        vec![],
    ];
    let mut all = Vec::new();
    for p in &preds {
        let m = match_quantities(&gold, p, &t, 0.5);
        let s = score_fact(&gold, p, &m);
        let shown: Vec<String> = p.iter().map(ToString::to_string).collect();
        println!("{:<28} QC {:.3}  CSA {:<6}  OP {:.3}", shown.join(" "), s.qc, s.csa.map(|c| format!("{c:.3}")).unwrap_or("n/a".into()), s.op);
        all.push(s);
    }
    let agg = aggregate(&all).unwrap();
    println!("mean x100: QC {:.2}  CSA {:?}  OP {:.2}", agg.qc, agg.csa, agg.op);
}
