//! Solve small assignment problems and compare with exhaustive search.

use graphon_match::assignment::{brute_force_assignment, solve_assignment, CostMatrix};

fn main() -> graphon_match::Result<()> {
    let costs = CostMatrix::from_rows(&[
        vec![4.0, 1.0, 3.0],
        vec![2.0, 0.0, 5.0],
        vec![3.0, 2.0, 2.0],
    ])?;
    let (p, cost) = solve_assignment(&costs);
    println!("row i takes column p[i]: {:?}, total {cost}", p.as_slice());

    // ties: every permutation costs the same, the smallest in lexicographic
    // order is returned
    let flat = CostMatrix::from_rows(&[vec![1.0; 4], vec![1.0; 4], vec![1.0; 4], vec![1.0; 4]])?;
    println!("all-equal costs: {:?}", solve_assignment(&flat).0.as_slice());

    let rows: Vec<Vec<f64>> = (0..7)
        .map(|i| (0..7).map(|j| ((i * 31 + j * 17) % 11) as f64).collect())
        .collect();
    let costs = CostMatrix::from_rows(&rows)?;
    let (fast, fast_cost) = solve_assignment(&costs);
    let (slow, slow_cost) = brute_force_assignment(&costs)?;
    println!("7x7: hungarian {:?} {fast_cost}, brute force {:?} {slow_cost}", fast.as_slice(), slow.as_slice());
    Ok(())
}
