use serde::{Deserialize, Serialize};

use super::{exact_log2, Assignment, EffectiveTopology, Scheme};

/// Outcome of [`validate`]: the first violated invariant, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violation: Option<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks every structural invariant of `a` and stops at the first failure.
pub fn validate(a: &Assignment) -> ValidationReport {
    ValidationReport {
        violation: check(a).err(),
    }
}

fn check(a: &Assignment) -> Result<(), String> {
    let spec = a.spec();
    let n = spec.n_nodes;
    let t = spec.n_transceivers;
    if n < 2 {
        return Err(format!("need at least 2 nodes, have {n}"));
    }
    if t < 2 {
        return Err(format!("need at least 2 transceivers, have {t}"));
    }

    let mut seen_channels = std::collections::BTreeSet::new();
    let mut memberships = vec![0u32; (n * t) as usize];
    for g in a.groups() {
        if g.is_empty() {
            return Err(format!("empty group on channel {}", g.channel));
        }
        if !seen_channels.insert(g.channel) {
            return Err(format!("duplicate channel {}", g.channel));
        }
        let mut members = g.members.clone();
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(format!("node {} listed twice on channel {}", w[0], g.channel));
        }
        for (pos, &node) in g.members.iter().enumerate() {
            let k = g.tx_at(pos);
            memberships[((node - 1) * t + (k - 1)) as usize] += 1;
        }
    }
    let slot = |node: u32, k: u32| memberships[((node - 1) * t + (k - 1)) as usize];
    for node in 1..=n {
        for k in 1..=t {
            if slot(node, k) > 1 {
                return Err(format!("node {node} in two groups for transceiver {k}"));
            }
        }
    }
    for node in 1..=n {
        for k in 1..=t {
            if slot(node, k) == 0 {
                return Err(format!("node {node} has no group for transceiver {k}"));
            }
        }
    }

    let channels = a.channel_count() as u64;
    match spec.scheme {
        Scheme::Hint => {
            let m = spec.m.ok_or("HINT assignment without M")?;
            let m64 = u64::from(m);
            if spec.is_padded() {
                if let Some(g) = a.groups().iter().find(|g| g.len() as u64 > m64) {
                    return Err(format!("group on channel {} exceeds M={m}", g.channel));
                }
            } else {
                sizes(a, m as usize)?;
                let per_index = m64.pow(t - 1);
                for k in 1..=t {
                    let count = a.groups_for(k).count() as u64;
                    if count != per_index {
                        return Err(format!("{count} Tx-{k} groups, expected {per_index}"));
                    }
                }
                expect_channels(channels, u64::from(t) * per_index)?;
            }
        }
        Scheme::Log2 => {
            let m = spec.m.ok_or("LOG-2 assignment without M")?;
            let l = exact_log2(m).ok_or_else(|| format!("LOG-2 M={m} is not a power of two"))?;
            if t != 2 {
                return Err(format!("LOG-2 uses 2 transceivers, spec has {t}"));
            }
            if n != m * l {
                return Err(format!("LOG-2 M={m} needs {} nodes, spec has {n}", m * l));
            }
            sizes(a, l as usize)?;
            expect_channels(channels, 2 * u64::from(m))?;
        }
        Scheme::Ring => {
            sizes(a, 4)?;
            expect_channels(channels, u64::from(n))?;
        }
        Scheme::Grid => {
            sizes(a, 2)?;
            expect_channels(channels, 2 * u64::from(n))?;
        }
    }

    if !EffectiveTopology::new(a).is_connected() {
        return Err("effective topology is disconnected".into());
    }
    Ok(())
}

fn sizes(a: &Assignment, want: usize) -> Result<(), String> {
    match a.groups().iter().find(|g| g.len() != want) {
        Some(g) => Err(format!(
            "group on channel {} has {} members, expected {want}",
            g.channel,
            g.len()
        )),
        None => Ok(()),
    }
}

fn expect_channels(have: u64, want: u64) -> Result<(), String> {
    if have != want {
        return Err(format!("{have} channels used, expected {want}"));
    }
    Ok(())
}
