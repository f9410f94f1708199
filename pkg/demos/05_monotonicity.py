"""The two-sided monotonicity chain on random conductivity pairs.

Each case solves the background problem, assembles the two weighted
gradient integrals, and compares them with the difference of boundary
pairings.  All three values share the sign of the contrast and the chain
lower <= middle <= upper holds case by case.
"""

from penclose import monotonicity


def main():
    print(f"{'p':>4} {'contrast':>9} {'lower':>12} {'middle':>12} {'upper':>12} {'ok':>4}")
    for rec in monotonicity.random_suite(p_list=(1.5, 2.0, 3.0), cases_per_p=6, seed=2024):
        print(f"{rec['p']:4.1f} {rec['contrast']:9.3f} {rec['lower']:12.4e} "
              f"{rec['middle']:12.4e} {rec['upper']:12.4e} {str(rec['verdict']):>4}")


if __name__ == "__main__":
    main()
