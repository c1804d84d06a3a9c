"""Regenerate the bundled demo networks under demos/networks/."""

from pathlib import Path

from dimeplan.netcore import UncertainNetwork, generate_community, save_network

OUT = Path(__file__).parent / "networks"


def demo6() -> UncertainNetwork:
    """Six friends A..F: three known friendships, four only suspected.

    The suspected ties leaving B and C sit at edge ids 4 and 5, so inviting
    {B, C} to an intervention reveals exactly those two bits.
    """
    return UncertainNetwork(
        6,
        certain_edges=[(0, 1, 0.6), (0, 2, 0.5), (3, 4, 0.7)],
        uncertain_edges=[
            (4, 5, 0.5, 0.6),
            (1, 4, 0.8, 0.75),
            (2, 5, 0.7, 0.5),
            (3, 0, 0.4, 0.4),
        ],
        name="demo6",
        node_labels=["A", "B", "C", "D", "E", "F"],
    )


def youth62() -> UncertainNetwork:
    """A 62-person three-community network sized like a small shelter cohort."""
    return generate_community(
        62, 3, 0.18, 0.02, uncertain_frac=0.35,
        p_range=(0.2, 0.6), u_range=(0.3, 0.8), seed=62,
    )


def main() -> None:
    OUT.mkdir(exist_ok=True)
    save_network(demo6(), OUT / "demo6.json")
    save_network(youth62(), OUT / "youth62.json")
    print(f"wrote {OUT / 'demo6.json'}")
    print(f"wrote {OUT / 'youth62.json'}")


if __name__ == "__main__":
    main()
