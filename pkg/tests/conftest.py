import pytest

from cartolex.ingest import Distribution, GoldLabel, Split

from corpus_fixtures import make_corpus, make_sample


@pytest.fixture
def tiny_corpus():
    samples = [
        make_sample("s1", premise="The judge was paid by the actor.",
                    hypothesis="The actor paid the judge."),
        make_sample("s2", premise="Dogs bark loudly.", hypothesis="Cats meow.",
                    gold_label=GoldLabel.NON_ENTAILMENT, split=Split.EVAL),
        make_sample("s3", premise="Rain fell all day.", hypothesis="Rain fell.",
                    gold_label=GoldLabel.NON_ENTAILMENT, split=Split.EVAL,
                    distribution=Distribution.OOD),
    ]
    trajectories = {
        "s1": (0.5, 0.7, 0.9),
        "s2": (0.2, 0.8, 0.5),
        "s3": (0.4, 0.4, 0.4),
    }
    return make_corpus(samples, trajectories)
