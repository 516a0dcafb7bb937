import numba as nb
import numpy as np
from scipy.special import ndtri

# uint64 words consumed by one protocol round: eight Gaussian
# draws, one basis coin and three spare words
ROUND_WORDS = 12
BLOCK_WORDS = 4

N_GAUSSIAN = 8
COIN_WORD = 8


def round_draws(seed, first_round, n_rounds):
    """
    Standard normal draws and basis coins for a run of
    consecutive rounds. The Philox counter is placed at the
    first round, so any chunking of the rounds reproduces
    the same draws.

    :param seed: 64-bit key
    :param first_round: index of the first round
    :param n_rounds: number of rounds
    :returns: (normals (n, 8), coins (n,))
    :rtype: tuple

    """

    bit_generator = np.random.Philox(
        key=seed, counter=first_round * ROUND_WORDS // BLOCK_WORDS
    )

    raw = bit_generator.random_raw(ROUND_WORDS * n_rounds).reshape(n_rounds, ROUND_WORDS)

    # 52-bit uniforms strictly inside (0, 1)
    uniforms = ((raw[:, :N_GAUSSIAN] >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0 ** -52

    coins = (raw[:, COIN_WORD] >> np.uint64(63)).astype(np.uint8)

    return ndtri(uniforms), coins


@nb.njit(cache=True)
def _dot6(row, q):

    out = 0.0

    for k in range(6):

        out += row[k] * q[k]

    return out


@nb.njit(cache=True, nogil=True)
def homodyne_rounds(normals, coins, bob_x, bob_p, eve_x, eve_p, std_alice, measure_both):
    """
    Play the protocol round by round.

    Alice's amplitude (x_A, p_A) displaces the vacuum of mode a,
    modes b and c enter in vacuum; the six input quadratures are
    pushed through the circuit rows. Bob homodynes x_a'' or p_a''
    by the coin. Eve reads the row matching Bob's revealed basis,
    or, when measure_both is set, reads both rows in every round
    and keeps the matching one afterwards.

    :param normals: (n, 8) standard normals
    :param coins: (n,) basis coins, 0 for x and 1 for p
    :param bob_x: circuit row of x_a''
    :param bob_p: circuit row of p_a''
    :param eve_x: circuit row Eve reads when Bob measured x
    :param eve_p: circuit row Eve reads when Bob measured p
    :param std_alice: sqrt(V_A / 4)
    :param measure_both: Eve measures both rows every round
    :returns: (alice, bob, eve) arrays
    :rtype:

    """

    n = normals.shape[0]

    alice = np.empty(n)
    bob = np.empty(n)
    eve = np.empty(n)

    q = np.empty(6)

    outcome_x = 0.0
    outcome_p = 0.0

    for r in range(n):

        x_alice = std_alice * normals[r, 0]
        p_alice = std_alice * normals[r, 1]

        q[0] = x_alice + 0.5 * normals[r, 2]
        q[1] = p_alice + 0.5 * normals[r, 3]

        for k in range(4):

            q[2 + k] = 0.5 * normals[r, 4 + k]

        if measure_both:

            outcome_x = _dot6(eve_x, q)
            outcome_p = _dot6(eve_p, q)

        if coins[r] == 0:

            alice[r] = x_alice
            bob[r] = _dot6(bob_x, q)

            eve[r] = outcome_x if measure_both else _dot6(eve_x, q)

        else:

            alice[r] = p_alice
            bob[r] = _dot6(bob_p, q)

            eve[r] = outcome_p if measure_both else _dot6(eve_p, q)

    return alice, bob, eve
