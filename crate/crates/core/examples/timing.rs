use std::time::Instant;

use drstack::evaluation::{cross_validate, CvProtocol, Metric};
use drstack::LearnerRegistry;

fn main() {
    let ds = drstack::synthetic::messidor_like(540, 611, 1);
    let reg = LearnerRegistry::with_defaults();
    for name in std::env::args().skip(1) {
        let learner = reg.create(&name).unwrap();
        let t = Instant::now();
        let r = cross_validate(&ds, learner.as_ref(), &CvProtocol::new(10, 1, 42)).unwrap();
        let s = r.summary(Metric::Accuracy);
        println!(
            "{name}: acc {:?} std {:?} auc {:?} in {:.1}s",
            s.mean,
            s.std,
            r.mean(Metric::Auc),
            t.elapsed().as_secs_f64()
        );
    }
}
