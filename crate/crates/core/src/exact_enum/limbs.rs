//! Little-endian `u64` limb arithmetic for the inner loop of the genus recurrence.
//!
//! Every value in the recurrence is a nonnegative integer and the hot operation
//! is `acc += a * b`. Doing that in place on a reusable buffer avoids the
//! temporary that `BigUint` multiplication would allocate for each term.

use num_bigint::BigUint;

/// `acc += a * b`. `acc` grows as needed.
pub fn mul_add(acc: &mut Vec<u64>, a: &[u64], b: &[u64]) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let need = a.len() + b.len() + 1;
    if acc.len() < need {
        acc.resize(need, 0);
    }
    for (i, &bi) in b.iter().enumerate() {
        if bi == 0 {
            continue;
        }
        let mut carry: u128 = 0;
        let row = &mut acc[i..];
        for (slot, &aj) in row.iter_mut().zip(a) {
            let t = *slot as u128 + (aj as u128) * (bi as u128) + carry;
            *slot = t as u64;
            carry = t >> 64;
        }
        let mut k = a.len();
        while carry != 0 {
            let t = row[k] as u128 + carry;
            row[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
}

/// `acc += a * m` for a single-limb multiplier.
pub fn mul_small_add(acc: &mut Vec<u64>, a: &[u64], m: u64) {
    mul_add(acc, a, &[m]);
}

/// `acc *= 2`.
pub fn double(acc: &mut Vec<u64>) {
    let mut carry = 0u64;
    for x in acc.iter_mut() {
        let next = *x >> 63;
        *x = (*x << 1) | carry;
        carry = next;
    }
    if carry != 0 {
        acc.push(carry);
    }
}

/// In-place division by a small divisor; returns the remainder.
pub fn div_small(acc: &mut [u64], d: u64) -> u64 {
    assert!(d != 0);
    let mut rem: u128 = 0;
    for x in acc.iter_mut().rev() {
        let cur = (rem << 64) | *x as u128;
        *x = (cur / d as u128) as u64;
        rem = cur % d as u128;
    }
    rem as u64
}

/// Drops high zero limbs.
pub fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn to_biguint(limbs: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(limbs.len() * 2);
    for &l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigUint::new(digits)
}

pub fn from_biguint(x: &BigUint) -> Vec<u64> {
    x.to_u64_digits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[u64]) -> BigUint {
        to_biguint(v)
    }

    proptest! {
        #[test]
        fn mul_add_matches_biguint(
            acc in proptest::collection::vec(any::<u64>(), 0..6),
            a in proptest::collection::vec(any::<u64>(), 0..6),
            b in proptest::collection::vec(any::<u64>(), 0..6),
        ) {
            let expected = big(&acc) + big(&a) * big(&b);
            let mut out = acc.clone();
            mul_add(&mut out, &a, &b);
            prop_assert_eq!(big(&out), expected);
        }

        #[test]
        fn div_small_matches_biguint(a in proptest::collection::vec(any::<u64>(), 1..6), d in 1u64..) {
            let x = big(&a);
            let mut out = a.clone();
            let r = div_small(&mut out, d);
            prop_assert_eq!(big(&out), &x / BigUint::from(d));
            prop_assert_eq!(BigUint::from(r), x % BigUint::from(d));
        }

        #[test]
        fn double_matches_biguint(a in proptest::collection::vec(any::<u64>(), 0..6)) {
            let mut out = a.clone();
            double(&mut out);
            prop_assert_eq!(big(&out), big(&a) * 2u32);
        }
    }

    #[test]
    fn round_trip_through_biguint() {
        let x = BigUint::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap();
        assert_eq!(to_biguint(&from_biguint(&x)), x);
        let mut z = vec![0, 0];
        trim(&mut z);
        assert!(z.is_empty());
    }
}
