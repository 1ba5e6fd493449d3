use faltings::poly::IntPolynomial;

fn main() {
    println!("# j-invariant candidates near the height minimum:");
    println!("# 0, 1, 1728, roots of unity, Lehmer's number and small Salem numbers.");
    println!("x");
    println!("x - 1");
    println!("x - 1728");
    println!("# cyclotomic polynomials Phi_k, k = 2..30");
    for k in 2..=30u32 {
        println!("{}", IntPolynomial::cyclotomic(k));
    }
    println!("# Lehmer's polynomial (smallest known Salem number)");
    println!("x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1");
    println!("# small Salem numbers");
    println!("x^8 - x^5 - x^4 - x^3 + 1");
    println!("x^6 - x^4 - x^3 - x^2 + 1");
    println!("x^4 - x^3 - x^2 - x + 1");
}
