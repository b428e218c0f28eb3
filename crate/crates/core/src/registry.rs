//! Name-keyed registries of learner and selector strategies.

use std::collections::BTreeMap;

use crate::ensemble::StackingSpec;
use crate::error::{Error, Result};
use crate::feature_selection::{FeatureSelector, SelectorSpec, WrapperParams};
use crate::learners::{
    ForestParams, Learner, LearnerSpec, LogisticParams, MlpParams, SvmParams, TreeParams,
};

type SpecFactory = Box<dyn Fn() -> LearnerSpec + Send + Sync>;

struct LearnerEntry {
    description: String,
    factory: SpecFactory,
}

/// Maps learner names (and aliases) to default configurations.
pub struct LearnerRegistry {
    entries: BTreeMap<String, LearnerEntry>,
    aliases: BTreeMap<String, String>,
}

impl LearnerRegistry {
    pub fn empty() -> Self {
        LearnerRegistry {
            entries: BTreeMap::new(),
            aliases: BTreeMap::new(),
        }
    }

    /// Registry with every built-in strategy.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(
            "svm",
            "RBF support vector machine (SMO) with Platt scaling",
            || LearnerSpec::Svm(SvmParams::default()),
        );
        r.register("nn", "single-hidden-layer perceptron", || {
            LearnerSpec::Mlp(MlpParams::default())
        });
        r.register("rf", "random forest of gini trees", || {
            LearnerSpec::Forest(ForestParams::default())
        });
        r.register(
            "stack",
            "stacked ensemble of rf, nn and svm under a logistic meta-classifier",
            || LearnerSpec::Stacking(StackingSpec::default()),
        );
        r.register("tree", "single gini decision tree", || {
            LearnerSpec::Tree(TreeParams::default())
        });
        r.register("logistic", "L2-regularized logistic regression", || {
            LearnerSpec::Logistic(LogisticParams::default())
        });
        r.alias("mlp", "nn");
        r.alias("forest", "rf");
        r.alias("stacking", "stack");
        r
    }

    pub fn register<F>(&mut self, name: &str, description: &str, factory: F)
    where
        F: Fn() -> LearnerSpec + Send + Sync + 'static,
    {
        self.entries.insert(
            name.to_string(),
            LearnerEntry {
                description: description.to_string(),
                factory: Box::new(factory),
            },
        );
    }

    pub fn alias(&mut self, alias: &str, target: &str) {
        self.aliases.insert(alias.to_string(), target.to_string());
    }

    fn resolve<'a>(&'a self, name: &'a str) -> Result<(&'a str, &'a LearnerEntry)> {
        let canonical = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.entries
            .get_key_value(canonical)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| Error::UnknownLearner(name.to_string()))
    }

    pub fn spec(&self, name: &str) -> Result<LearnerSpec> {
        self.resolve(name).map(|(_, e)| (e.factory)())
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Learner>> {
        self.spec(name)?.build()
    }

    pub fn canonical_name<'a>(&'a self, name: &'a str) -> Result<&'a str> {
        self.resolve(name).map(|(k, _)| k)
    }

    /// `(name, description)` pairs in name order.
    pub fn describe(&self) -> Vec<(&str, &str)> {
        self.entries
            .iter()
            .map(|(k, e)| (k.as_str(), e.description.as_str()))
            .collect()
    }
}

impl Default for LearnerRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

/// Maps selector names to default configurations.
pub struct SelectorRegistry {
    entries: BTreeMap<String, SelectorSpec>,
}

impl SelectorRegistry {
    pub fn with_defaults() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert("infogain".to_string(), SelectorSpec::InfoGain);
        entries.insert(
            "wrapper".to_string(),
            SelectorSpec::Wrapper(WrapperParams::default()),
        );
        SelectorRegistry { entries }
    }

    pub fn register(&mut self, name: &str, spec: SelectorSpec) {
        self.entries.insert(name.to_string(), spec);
    }

    pub fn spec(&self, name: &str) -> Result<SelectorSpec> {
        self.entries
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownSelector(name.to_string()))
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn FeatureSelector>> {
        self.spec(name).map(|s| s.build())
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

impl Default for SelectorRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_aliases_resolve() {
        let r = LearnerRegistry::with_defaults();
        for (name, expected) in [
            ("svm", "svm"),
            ("nn", "nn"),
            ("mlp", "nn"),
            ("forest", "rf"),
            ("stack", "stack"),
            ("tree", "tree"),
            ("logistic", "logistic"),
        ] {
            assert_eq!(r.create(name).unwrap().name(), expected);
        }
        assert!(matches!(r.create("knn"), Err(Error::UnknownLearner(_))));
        assert_eq!(r.canonical_name("stacking").unwrap(), "stack");
    }

    #[test]
    fn custom_registration() {
        let mut r = LearnerRegistry::empty();
        r.register("stump", "depth-one tree", || {
            LearnerSpec::Tree(TreeParams {
                max_depth: 1,
                min_leaf: 1,
            })
        });
        assert_eq!(
            r.spec("stump").unwrap(),
            LearnerSpec::Tree(TreeParams {
                max_depth: 1,
                min_leaf: 1
            })
        );
        assert_eq!(r.describe(), vec![("stump", "depth-one tree")]);
    }

    #[test]
    fn selectors() {
        let s = SelectorRegistry::with_defaults();
        assert_eq!(s.names(), ["infogain", "wrapper"]);
        assert_eq!(s.create("wrapper").unwrap().name(), "wrapper");
        assert!(matches!(s.create("pso"), Err(Error::UnknownSelector(_))));
    }
}
