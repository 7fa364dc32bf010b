import pytest

from convtab.search import SearchConfig, search_labels
from convtab.scorer import TrainConfig, train
from convtab.synthetic import SyntheticSpec, gen_synthetic
from convtab.table_model import load_table

OLYMPICS_CSV = (
    "Year,City,Country,Nations\n"
    "2004,Athens,Greece,201\n"
    "2008,Beijing,China,204\n"
    "2012,London,UK,205\n"
)

OLYMPICS_CONVERSATION = [
    ("Which city hosted the 2008 Summer Olympics?", ["Beijing"]),
    ("How many nations participate in that year?", ["204"]),
    ("What about in 2012?", ["205"]),
]


@pytest.fixture
def olympics():
    return load_table(OLYMPICS_CSV, table_id="olympics")


@pytest.fixture
def tie_table():
    # Nations has a tied maximum on rows 1 and 2.
    return load_table(
        "Year,City,Nations\n2004,Athens,201\n2008,Beijing,204\n2012,London,204\n",
        table_id="ties")


@pytest.fixture(scope="session")
def synthetic_corpus():
    spec = SyntheticSpec(n_tables=200, copy_turn_fraction=0.6, seed=11)
    return gen_synthetic(spec)


@pytest.fixture(scope="session")
def synthetic_labels(synthetic_corpus):
    config = SearchConfig()
    labels = []
    for conv in synthetic_corpus[:160]:
        turns = [(t["question"], t["answers"]) for t in conv["turns"]]
        labels.extend(search_labels(turns, conv["table"], config))
    return labels


@pytest.fixture(scope="session")
def synthetic_tables(synthetic_corpus):
    return {conv["table"].id: conv["table"] for conv in synthetic_corpus}


@pytest.fixture(scope="session")
def trained_model(synthetic_labels, synthetic_tables):
    weights, accuracy = train(synthetic_labels, synthetic_tables,
                              TrainConfig(epochs=10, seed=3))
    return weights, accuracy


@pytest.fixture(scope="session")
def fixture_model(trained_model):
    """Synthetic model fine-tuned on labels searched from the Olympics fixture."""
    weights, _ = trained_model
    table = load_table(OLYMPICS_CSV, table_id="olympics")
    labels = search_labels(OLYMPICS_CONVERSATION, table, SearchConfig())
    tuned, _ = train(labels, {"olympics": table},
                     TrainConfig(epochs=25, seed=5, heldout_fraction=0.0),
                     init=weights)
    return tuned
