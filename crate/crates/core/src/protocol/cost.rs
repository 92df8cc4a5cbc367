use crate::basis::{binomial, ceil_log2};

/// Which protocol a qubit count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Protocol1,
    KParty(usize),
    /// Two two-party constructions feeding one SWAP test.
    Lin4,
}

impl ProtocolKind {
    pub fn messages(self) -> u64 {
        match self {
            ProtocolKind::Protocol1 => 2,
            ProtocolKind::KParty(k) => k as u64,
            ProtocolKind::Lin4 => 4,
        }
    }
}

/// Total qubits sent: `messages * ceil(log2 C(n,s)) * repetitions`.
pub fn comm_cost(kind: ProtocolKind, n: usize, s: usize, repetitions: u32) -> u64 {
    let per_message = ceil_log2(&binomial(n as u64, s as u64));
    kind.messages() * per_message * u64::from(repetitions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol1_cost_at_16() {
        assert_eq!(comm_cost(ProtocolKind::Protocol1, 16, 4, 1), 22);
        assert_eq!(comm_cost(ProtocolKind::Protocol1, 16, 4, 3), 66);
        assert_eq!(comm_cost(ProtocolKind::KParty(3), 8, 4, 1), 3 * 7);
        assert_eq!(comm_cost(ProtocolKind::Lin4, 16, 4, 1), 44);
    }

    #[test]
    fn cost_grows_like_sqrt_n_log_n() {
        for n in [16usize, 64, 256, 1024] {
            let s = (n as f64).sqrt() as usize;
            let cost = comm_cost(ProtocolKind::Protocol1, n, s, 1) as f64;
            let ratio = cost / ((n as f64).sqrt() * (n as f64).log2());
            assert!(ratio <= 2.2, "n={n}: {ratio}");
        }
    }

    #[test]
    fn trivial_message_costs_nothing() {
        assert_eq!(comm_cost(ProtocolKind::Protocol1, 5, 5, 1), 0);
    }
}
