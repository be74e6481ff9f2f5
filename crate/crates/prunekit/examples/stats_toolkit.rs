//! The statistics underneath the harness: paired t-tests, Bonferroni
//! correction, and the special functions they rest on.

use prunekit::eval::{bonferroni, macro_f1, paired_ttest, reduction_mean, speedup};
use prunekit::stats::{incomplete_beta, inverse_normal_cdf, student_t_two_sided_p};

fn main() -> prunekit::Result<()> {
    // Special functions.
    println!("I_0.5(2, 3)        = {:.6}", incomplete_beta(2.0, 3.0, 0.5));
    println!("P(|T_10| >= 2.228) = {:.6} (5% critical value)", student_t_two_sided_p(2.228_138_85, 10.0));
    println!("Phi^-1(0.975)      = {:.6}", inverse_normal_cdf(0.975));

    // Paired comparison of two effectiveness samples over folds.
    let with = [0.81, 0.79, 0.80, 0.82, 0.78];
    let without = [0.82, 0.80, 0.81, 0.82, 0.80];
    let outcome = paired_ttest(&with, &without, 0.05)?;
    println!(
        "paired t-test: t={:.4} p={:.4} verdict {:?}",
        outcome.t, outcome.p, outcome.verdict
    );

    // Family-wise correction across three method comparisons.
    let p_values = [0.01, 0.04, 0.20];
    let surviving = bonferroni(&p_values, 0.05);
    println!("bonferroni at 0.05 over {} tests: {:?}", p_values.len(), surviving);

    // Protocol metrics.
    let folds = [(1000, 750), (1000, 730), (1000, 770)];
    println!("mean reduction     = {:.4}", reduction_mean(&folds)?);
    println!("speedup 120s/80s   = {:.4}x", speedup(120.0, 80.0)?);
    println!(
        "macro F1           = {:.4}",
        macro_f1(&[0, 0, 1, 1, 2], &[0, 1, 1, 1, 2], 3)?
    );
    Ok(())
}
