import numpy as np
import pytest

from forecast_ensembles import ForecastTable


@pytest.fixture
def toy_table() -> ForecastTable:
    """3 forecasters x 4 questions with two absent cells."""
    return ForecastTable(
        question_ids=("a", "b", "c", "d"),
        forecaster_ids=("x", "y", "z"),
        forecasts=np.array([
            [0.9, 0.2, 0.8, 0.4],
            [0.6, np.nan, 0.3, 0.9],
            [0.1, 0.7, np.nan, 0.2],
        ]),
        outcomes=np.array([1, -1, 1, -1]),
    )


def random_table(rng: np.random.Generator, n_forecasters: int, n_questions: int,
                 missing: float = 0.0) -> ForecastTable:
    forecasts = rng.random((n_forecasters, n_questions))
    if missing > 0:
        forecasts = np.where(rng.random(forecasts.shape) < missing, np.nan, forecasts)
    outcomes = rng.choice([1, -1], size=n_questions)
    return ForecastTable(
        question_ids=tuple(f"q{j}" for j in range(n_questions)),
        forecaster_ids=tuple(f"f{i}" for i in range(n_forecasters)),
        forecasts=forecasts,
        outcomes=outcomes,
    )
