//! Permutations as image vectors (`p[k] = p(k)`, 0-based), Koszul signs and set partitions.

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `a ∘ b`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&k| a[k]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut q = vec![0; p.len()];
    for (k, &v) in p.iter().enumerate() {
        q[v] = k;
    }
    q
}

pub fn transposition(n: usize, i: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i, i + 1);
    p
}

/// Adjacent transpositions `s_{a_1}, s_{a_2}, ...` with `p = ... s_{a_2} s_{a_1}`:
/// applying them in the returned order realises `p`.
pub fn adjacent_word(p: &[usize]) -> Vec<usize> {
    let mut arr = p.to_vec();
    let mut word = vec![];
    let n = arr.len();
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            if arr[k] > arr[k + 1] {
                arr.swap(k, k + 1);
                word.push(k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    word
}

pub fn is_odd(p: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Sign of moving graded blocks of degrees `degs` so that block `a` lands at `pos[a]`.
pub fn koszul_odd(degs: &[i64], pos: &[usize]) -> bool {
    let mut odd = false;
    for a in 0..degs.len() {
        for b in a + 1..degs.len() {
            if pos[a] > pos[b] && degs[a] % 2 != 0 && degs[b] % 2 != 0 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Element permutation induced by moving blocks of the given sizes (block `a` to `pos[a]`).
pub fn block_perm(sizes: &[usize], pos: &[usize]) -> Perm {
    let k = sizes.len();
    let inv = inverse(pos);
    let mut new_start = vec![0; k];
    let mut acc = 0;
    for &a in &inv {
        new_start[a] = acc;
        acc += sizes[a];
    }
    let mut out = Vec::with_capacity(acc);
    for a in 0..k {
        for e in 0..sizes[a] {
            out.push(new_start[a] + e);
        }
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = vec![];
    let mut cur = identity(n);
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Unordered set partitions of `elems`; blocks keep the input order and are listed by first element.
pub fn set_partitions(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn go(elems: &[usize], i: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == elems.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(elems[i]);
            go(elems, i + 1, cur, out);
            cur[b].pop();
        }
        cur.push(vec![elems[i]]);
        go(elems, i + 1, cur, out);
        cur.pop();
    }
    let mut out = vec![];
    go(elems, 0, &mut vec![], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_realises_perm() {
        for p in all_perms(4) {
            let mut cur = identity(4);
            for i in adjacent_word(&p) {
                cur = compose(&transposition(4, i), &cur);
            }
            assert_eq!(cur, p);
            assert_eq!(adjacent_word(&p).len() % 2 == 1, is_odd(&p));
        }
    }

    #[test]
    fn partition_counts() {
        let bell = [1, 1, 2, 5, 15, 52];
        for n in 0..6 {
            let e: Vec<usize> = (0..n).collect();
            assert_eq!(set_partitions(&e).len(), bell[n]);
        }
    }

    #[test]
    fn blocks() {
        assert_eq!(block_perm(&[2, 1], &[1, 0]), vec![1, 2, 0]);
        assert!(koszul_odd(&[1, 3], &[1, 0]));
        assert!(!koszul_odd(&[1, 2], &[1, 0]));
    }
}
