//! Parse, print and evaluate initial-profile expressions.

use condensate_linear::profile::parse_profile;

fn main() {
    for text in ["-1", "0.3*k", "exp(-k)", "k*exp(-k/2)", "power(2, 1.5)", "gauss-bump(1, 3, 0.5)", "sinh(k)/(1+k^2)", "1 +", "foo(k)"] {
        match parse_profile(text) {
            Ok(e) => println!("{text:<24} → {:<40} u(1) = {:.6}", e.to_string(), e.eval(1.0)),
            Err(err) => println!("{text:<24} ✗ {err}"),
        }
    }
}
