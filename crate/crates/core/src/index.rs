//! In-memory graph index over ingested products and relations.
//!
//! The index owns deduplicated records and is the lookup structure every
//! later stage works from. Duplicate product ids keep the first record seen;
//! relations are canonicalized and deduplicated on the full
//! `(source, target, semantics)` triple, preserving first-seen order.
//! Relations with endpoints missing from the products dump are kept (the
//! counterpart may matter to edge accounting) but counted as dangling.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::model::{canonicalize_relation, ProductId, Relation, ResearchProduct};

/// Deduplication and coverage counters from one index build.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IndexStats {
    pub products_indexed: u64,
    pub duplicate_products: u64,
    pub relations_indexed: u64,
    pub duplicate_relations: u64,
    /// Relations with at least one endpoint absent from the products dump.
    pub dangling_relations: u64,
}

/// Lookup structure over one dump pair.
#[derive(Debug, Clone, Default)]
pub struct GraphIndex {
    products: BTreeMap<ProductId, ResearchProduct>,
    relations: Vec<Relation>,
    stats: IndexStats,
}

impl GraphIndex {
    pub fn build(
        products: impl IntoIterator<Item = ResearchProduct>,
        relations: impl IntoIterator<Item = Relation>,
    ) -> Self {
        let mut index = GraphIndex::default();
        for product in products {
            match index.products.entry(product.id.clone()) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(product);
                    index.stats.products_indexed += 1;
                }
                std::collections::btree_map::Entry::Occupied(_) => {
                    index.stats.duplicate_products += 1;
                }
            }
        }
        let mut seen: HashSet<Relation> = HashSet::new();
        for relation in relations {
            let relation = canonicalize_relation(relation);
            if !seen.insert(relation.clone()) {
                index.stats.duplicate_relations += 1;
                continue;
            }
            if !index.products.contains_key(&relation.source)
                || !index.products.contains_key(&relation.target)
            {
                index.stats.dangling_relations += 1;
            }
            index.stats.relations_indexed += 1;
            index.relations.push(relation);
        }
        index
    }

    pub fn get(&self, id: &ProductId) -> Option<&ResearchProduct> {
        self.products.get(id)
    }

    pub fn contains(&self, id: &ProductId) -> bool {
        self.products.contains_key(id)
    }

    pub fn products_len(&self) -> usize {
        self.products.len()
    }

    pub fn relations_len(&self) -> usize {
        self.relations.len()
    }

    /// Products in id order.
    pub fn products(&self) -> impl Iterator<Item = &ResearchProduct> {
        self.products.values()
    }

    /// Canonicalized, deduplicated relations in first-seen order.
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Canonical supplement edges (`IsSupplementedBy`, publication → dataset
    /// direction), first-seen order.
    pub fn supplement_edges(&self) -> impl Iterator<Item = &Relation> {
        self.relations
            .iter()
            .filter(|r| r.semantics == crate::model::RelationSemantics::IsSupplementedBy)
    }

    /// Canonical citation-style edges (`Cites`/`References`), first-seen
    /// order.
    pub fn citation_edges(&self) -> impl Iterator<Item = &Relation> {
        self.relations
            .iter()
            .filter(|r| r.semantics.is_vanilla_citation())
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }
}
