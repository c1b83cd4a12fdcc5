//! Population disciplines: Pareto archive (Global SEMO), one member per
//! ε-box (DEMO) and two members per ones-count (Diverse Population-Based EA).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::fitness::{box_index, dominates_strong, dominates_weak, BoxIndex, Fitness};
use crate::graph::Genotype;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    pub genotype: Genotype,
    pub fitness: Fitness,
    pub box_index: Option<BoxIndex>,
    pub ones: usize,
}

impl Individual {
    pub fn new(genotype: Genotype, fitness: Fitness) -> Self {
        let ones = genotype.count_ones();
        Self { genotype, fitness, box_index: None, ones }
    }

    /// Attaches the DEMO box for a genotype of length `n`.
    pub fn boxed(mut self) -> Self {
        self.box_index = Some(box_index(&self.fitness, self.genotype.len()));
        self
    }

    fn boxed_index(&self) -> BoxIndex {
        self.box_index.expect("DEMO individuals carry a box index")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discipline {
    Semo,
    Demo,
    Dpbea,
}

/// Members are kept in insertion order; parent selection indexes into them.
#[derive(Debug, Clone)]
pub struct Archive {
    discipline: Discipline,
    members: Vec<Individual>,
}

impl Archive {
    pub fn new(discipline: Discipline) -> Self {
        Self { discipline, members: Vec::new() }
    }

    pub fn discipline(&self) -> Discipline {
        self.discipline
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Offers `cand` to the archive; returns whether it is a member afterwards.
    pub fn insert(&mut self, cand: Individual) -> bool {
        match self.discipline {
            Discipline::Semo => self.semo_insert(cand),
            Discipline::Demo => self.demo_insert(cand),
            Discipline::Dpbea => self.dpbea_insert(cand),
        }
    }

    /// Rejects `cand` if a member weakly dominates it; otherwise drops every
    /// member `cand` weakly dominates and adds it.
    pub fn semo_insert(&mut self, cand: Individual) -> bool {
        if self.members.iter().any(|y| dominates_weak(&y.fitness, &cand.fitness)) {
            return false;
        }
        self.members.retain(|z| !dominates_weak(&cand.fitness, &z.fitness));
        self.members.push(cand);
        true
    }

    /// Rejects `cand` if a member strongly dominates it, or shares its box
    /// with `Cost + 2*LP` no larger. Otherwise drops every member it weakly
    /// dominates or that shares its box, and adds it.
    pub fn demo_insert(&mut self, cand: Individual) -> bool {
        let cand_box = cand.boxed_index();
        let rejected = self.members.iter().any(|y| {
            dominates_strong(&y.fitness, &cand.fitness)
                || (y.boxed_index() == cand_box
                    && y.fitness.cost_plus_two_lp() <= cand.fitness.cost_plus_two_lp())
        });
        if rejected {
            return false;
        }
        self.members
            .retain(|z| !dominates_weak(&cand.fitness, &z.fitness) && z.boxed_index() != cand_box);
        self.members.push(cand);
        true
    }

    /// Adds `cand` to the members with the same number of ones, then keeps
    /// only the minimizer of `Cost + LP` and the minimizer of `Cost + 2*LP`
    /// in that group. Ties go to the older member.
    pub fn dpbea_insert(&mut self, cand: Individual) -> bool {
        let k = cand.ones;
        // Group positions in insertion order, candidate last.
        let mut group: Vec<usize> = (0..self.members.len()).filter(|&i| self.members[i].ones == k).collect();
        self.members.push(cand);
        let cand_pos = self.members.len() - 1;
        group.push(cand_pos);

        let argmin = |key: fn(&Fitness) -> u64| -> usize {
            let mut best = group[0];
            for &i in &group[1..] {
                if key(&self.members[i].fitness) < key(&self.members[best].fitness) {
                    best = i;
                }
            }
            best
        };
        let min1 = argmin(Fitness::twice_cost_plus_lp);
        let min2 = argmin(Fitness::cost_plus_two_lp);

        let mut idx = 0;
        self.members.retain(|z| {
            let i = idx;
            idx += 1;
            z.ones != k || i == min1 || i == min2
        });
        min1 == cand_pos || min2 == cand_pos
    }

    /// Checks the structural invariant of the discipline: a Pareto set with
    /// one member per LP value, one member per box without strong
    /// dominance, or at most two per ones-count.
    pub fn check_structure(&self) -> Result<(), String> {
        match self.discipline {
            Discipline::Semo => {
                let mut lp_values = HashSet::new();
                for m in &self.members {
                    if !lp_values.insert(m.fitness.lp2) {
                        return Err(format!("two members with lp2 = {}", m.fitness.lp2));
                    }
                }
                for (i, a) in self.members.iter().enumerate() {
                    for b in &self.members[i + 1..] {
                        if dominates_weak(&a.fitness, &b.fitness) || dominates_weak(&b.fitness, &a.fitness) {
                            return Err(format!("{:?} and {:?} are comparable", a.fitness, b.fitness));
                        }
                    }
                }
            }
            Discipline::Demo => {
                let mut boxes = HashSet::new();
                for m in &self.members {
                    if !boxes.insert(m.boxed_index()) {
                        return Err(format!("two members in box {:?}", m.boxed_index()));
                    }
                }
                for a in &self.members {
                    for b in &self.members {
                        if dominates_strong(&a.fitness, &b.fitness) {
                            return Err(format!("{:?} strongly dominates {:?}", a.fitness, b.fitness));
                        }
                    }
                }
            }
            Discipline::Dpbea => {
                let n = self.members.first().map_or(0, |m| m.genotype.len());
                let mut per_count = vec![0usize; n + 1];
                for m in &self.members {
                    per_count[m.ones] += 1;
                    if per_count[m.ones] > 2 {
                        return Err(format!("more than two members with {} ones", m.ones));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(bits: &str, cost: u64, lp2: u64) -> Individual {
        Individual::new(bits.parse().unwrap(), Fitness::new(cost, lp2))
    }

    fn fits(a: &Archive) -> Vec<(u64, u64)> {
        a.members().iter().map(|m| (m.fitness.cost, m.fitness.lp2)).collect()
    }

    #[test]
    fn semo_empty_accepts() {
        let mut a = Archive::new(Discipline::Semo);
        assert!(a.insert(ind("0000", 5, 5)));
    }

    #[test]
    fn semo_rejects_equal_fitness() {
        let mut a = Archive::new(Discipline::Semo);
        a.insert(ind("0011", 3, 4));
        assert!(!a.insert(ind("0101", 3, 4)));
        assert_eq!(a.len(), 1);
        assert_eq!(a.members()[0].genotype.to_string(), "0011");
    }

    #[test]
    fn semo_better_point_evicts() {
        let mut a = Archive::new(Discipline::Semo);
        a.insert(ind("0011", 3, 4));
        a.insert(ind("1000", 1, 8));
        a.insert(ind("1100", 5, 1));
        assert_eq!(a.len(), 3);
        assert!(a.insert(ind("0110", 2, 4)));
        assert_eq!(fits(&a), vec![(1, 8), (5, 1), (2, 4)]);
        assert!(a.insert(ind("0001", 1, 1)));
        assert_eq!(fits(&a), vec![(1, 1)]);
        a.check_structure().unwrap();
    }

    fn boxed(bits: &str, cost: u64, lp2: u64) -> Individual {
        ind(bits, cost, lp2).boxed()
    }

    #[test]
    fn demo_same_box_tie_keeps_incumbent() {
        // n = 4: both land in box (31, 30).
        let a1 = boxed("1100", 34, 61);
        let a2 = boxed("0011", 35, 60);
        assert_eq!(a1.box_index.unwrap().b1, a2.box_index.unwrap().b1);
        assert_eq!(a1.box_index.unwrap().b2, a2.box_index.unwrap().b2);
        let mut a = Archive::new(Discipline::Demo);
        assert!(a.insert(a1));
        // 35 + 60 == 34 + 61: incumbent wins.
        assert!(!a.insert(a2));
        assert_eq!(a.members()[0].genotype.to_string(), "1100");
    }

    #[test]
    fn demo_same_box_smaller_sum_evicts() {
        let mut a = Archive::new(Discipline::Demo);
        // Incomparable fitness, same box, smaller Cost + 2LP.
        let inc = boxed("1100", 34, 62);
        let cand = boxed("0011", 35, 60);
        assert_eq!(inc.box_index, cand.box_index);
        assert!(a.insert(inc));
        assert!(a.insert(cand));
        assert_eq!(fits(&a), vec![(35, 60)]);
    }

    #[test]
    fn demo_equal_fitness_is_rejected_by_box_rule() {
        let mut a = Archive::new(Discipline::Demo);
        assert!(a.insert(boxed("1000", 3, 2)));
        assert!(!a.insert(boxed("0100", 3, 2)));
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn demo_strong_dominance_rejects_and_weak_evicts() {
        let mut a = Archive::new(Discipline::Demo);
        assert!(a.insert(boxed("0000", 0, 40)));
        assert!(a.insert(boxed("1111", 40, 0)));
        assert!(!a.insert(boxed("1110", 41, 0)));
        assert!(a.insert(boxed("0110", 1, 20)));
        assert!(a.insert(boxed("0111", 0, 0)));
        assert_eq!(fits(&a), vec![(0, 0)]);
        a.check_structure().unwrap();
    }

    #[test]
    fn dpbea_empty_group_keeps_candidate() {
        let mut a = Archive::new(Discipline::Dpbea);
        assert!(a.insert(ind("0100", 5, 5)));
        assert!(a.insert(ind("0000", 0, 10)));
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn dpbea_keeps_both_minimizers() {
        let mut a = Archive::new(Discipline::Dpbea);
        // y: 2c+l = 12, c+l = 8 ; cand: 2c+l = 11, c+l = 9
        assert!(a.insert(ind("1000", 4, 4)));
        assert!(a.insert(ind("0100", 2, 7)));
        assert_eq!(fits(&a), vec![(4, 4), (2, 7)]);
    }

    #[test]
    fn dpbea_group_collapses_to_two() {
        let mut a = Archive::new(Discipline::Dpbea);
        a.insert(ind("1000", 4, 4)); // (12, 8)
        a.insert(ind("0100", 2, 7)); // (11, 9)
        // (10, 9): new Cost+LP minimizer, evicts (2,7)
        assert!(a.insert(ind("0010", 1, 8)));
        assert_eq!(fits(&a), vec![(4, 4), (1, 8)]);
        // (10, 7): new Cost+2LP minimizer, evicts (4,4); loses the Cost+LP tie
        assert!(a.insert(ind("0001", 3, 4)));
        assert_eq!(a.len(), 2);
        // A dominated candidate is dropped.
        assert!(!a.insert(ind("1000", 9, 9)));
        assert_eq!(a.len(), 2);
        a.check_structure().unwrap();
    }

    #[test]
    fn dpbea_single_minimizer_of_both() {
        let mut a = Archive::new(Discipline::Dpbea);
        a.insert(ind("1000", 4, 4));
        a.insert(ind("0100", 2, 7));
        assert!(a.insert(ind("0010", 1, 1)));
        assert_eq!(fits(&a), vec![(1, 1)]);
    }

    #[test]
    fn dpbea_ties_favor_incumbent() {
        let mut a = Archive::new(Discipline::Dpbea);
        a.insert(ind("1000", 3, 2));
        assert!(!a.insert(ind("0100", 3, 2)));
        assert_eq!(a.members()[0].genotype.to_string(), "1000");
    }
}
