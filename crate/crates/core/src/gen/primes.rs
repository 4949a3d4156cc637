/// All primes `p` with `lo < p < hi`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= 2 || hi <= lo + 1 {
        return Vec::new();
    }
    let limit = hi as usize;
    let mut composite = vec![false; limit];
    let mut out = Vec::new();
    for p in 2..limit {
        if composite[p] {
            continue;
        }
        if p as u64 > lo {
            out.push(p as u64);
        }
        let mut m = p * p;
        while m < limit {
            composite[m] = true;
            m += p;
        }
    }
    out
}

/// Primes strictly inside the real interval `(lo, hi)`.
pub fn primes_in_window(lo: f64, hi: f64) -> Vec<u64> {
    let lo_i = lo.max(0.0).floor() as u64;
    let hi_i = hi.max(0.0).ceil() as u64;
    primes_in_range(lo_i, hi_i)
        .into_iter()
        .filter(|&p| (p as f64) > lo && (p as f64) < hi)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_windows() {
        assert_eq!(primes_in_range(4, 8), vec![5, 7]);
        assert_eq!(primes_in_range(24, 32), vec![29, 31]);
        assert_eq!(primes_in_range(2, 3), Vec::<u64>::new());
        assert_eq!(primes_in_range(1, 12), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn real_window_is_open() {
        assert_eq!(primes_in_window(4.0, 8.0), vec![5, 7]);
        assert_eq!(primes_in_window(5.0, 7.0), Vec::<u64>::new());
        assert_eq!(primes_in_window(4.5, 7.5), vec![5, 7]);
    }
}
