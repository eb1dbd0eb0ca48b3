import numpy as np
import pytest

import seglv as sg


@pytest.fixture(scope="session")
def tiny3():
    """3x3 grid, h = 1, a single interior node."""
    mask = np.zeros((3, 3), dtype=bool)
    mask[1, 1] = True
    return sg.GridDomain.from_mask(mask, 1.0)


@pytest.fixture(scope="session")
def square16():
    return sg.unit_square_domain(16)


@pytest.fixture(scope="session")
def ball16():
    h = 1 / 16
    m = 3 * h
    return sg.build_domain([sg.BallSpec((0.0, 0.0), 1.0, 0)], [],
                           (-1 - m, -1 - m, 1 + m, 1 + m), h)


@pytest.fixture(scope="session")
def dumbbell2():
    h = 1 / 16
    balls = [sg.BallSpec((0.0, 0.0), 1.0, 0), sg.BallSpec((4.0, 0.0), 1.0, 1)]
    corridors = [sg.CorridorSpec(0, 1, 0.3)]
    return sg.build_domain(balls, corridors, (-1.25, -1.25, 5.25, 1.25), h)


@pytest.fixture(scope="session")
def dumbbell2_setup(dumbbell2):
    """Baselines and species for the 2-ball dumbbell (lambda = 2 lambda_1)."""
    base, species = [], []
    for i in range(2):
        region = dumbbell2.species_ball_mask(i)
        guess, lam1 = sg.positive_branch_guess(dumbbell2, region)
        sp = sg.SpeciesParams(lam=2 * lam1, p=2.0)
        species.append(sp)
        report = sg.solve_ball(sp, region, dumbbell2, guess)
        assert report.positive
        base.append(report.solution)
    return {"domain": dumbbell2, "species": species,
            "baseline": sg.StateField(base)}


@pytest.fixture(scope="session")
def dumbbell2_trace(dumbbell2_setup):
    """Barrier continuation on the 2-ball dumbbell up to kappa = 65536."""
    setup = dumbbell2_setup
    model = sg.ModelKind.barrier(setup["baseline"])
    schedule = sg.ContinuationSchedule(4.0, 2.0, 15, newton_tol=1e-10)
    trace = sg.continuation_run(setup["domain"], setup["species"], model, schedule)
    assert trace.failure is None
    return trace


def random_field(domain, rng, scale=1.0):
    vals = np.zeros((domain.ny, domain.nx))
    vals[domain.interior_mask] = rng.standard_normal(domain.n_interior) * scale
    return sg.ScalarField(domain, vals)
