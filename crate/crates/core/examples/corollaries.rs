//! Permuting the standard concatenation, and splitting it into a double
//! product.
use cube_shuffle::shuffle::{double_product_plan, permutation_plan};

fn main() -> cube_shuffle::Result<()> {
    for perm in [vec![2, 1], vec![3, 1, 2], vec![1, 5, 3, 4, 2]] {
        let plan = permutation_plan(2, &perm)?;
        println!("permutation {perm:?}: verified to 32 = {}", plan.verify(32).pass);
    }
    let plan = double_product_plan(2)?;
    println!("double product: verified to 32 = {}", plan.verify(32).pass);
    for step in plan.provenance() {
        println!("  {}", serde_json::to_value(step).unwrap()["lemma"]);
    }
    Ok(())
}
