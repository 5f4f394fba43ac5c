"""Fit both estimators from logged interactions and score them.

The Broca model learns trajectory-to-message conventions; the Wernicke
model learns message-to-trajectory decoding, pseudo-labeling each record
with a Boltzmann-rational MAP guess of the hidden target. On noisy data
the decoder beats the literal take-the-observed-trajectory baseline.
"""

from cooplang import (
    CommunityConfig,
    MapConfig,
    build_community,
    collect,
    eval_listener,
    eval_speaker,
    fit_broca,
    fit_wernicke,
    lewis_game,
)


def main():
    game = lewis_game()

    print("=== noiseless community: conventions are fully recoverable ===")
    clean = build_community(
        CommunityConfig(game=game, epsilon=0.0, greedy_msg=True), 0)
    dataset = collect(clean, 300, master_seed=0)
    broca = fit_broca(dataset, game)
    wernicke = fit_wernicke(dataset, game, MapConfig(alpha=1000.0))
    print(f"speaker success: "
          f"{eval_speaker(broca, clean, n=300, seed=1).success_rate:.3f}")
    print(f"listener recovery: "
          f"{eval_listener(wernicke, clean, n=300, seed=1).recovery_rate:.3f}")

    print()
    print("=== noisy speakers: MAP pseudo-labels denoise the dataset ===")
    noisy = build_community(CommunityConfig(game=game, temp_msg=1.0), 42)
    dataset = collect(noisy, 2000, master_seed=42)
    wernicke = fit_wernicke(dataset, game, MapConfig(alpha=1.0))
    report = eval_listener(wernicke, noisy, n=2000, seed=42)
    print(f"decoder recovery:  {report.recovery_rate:.4f}")
    print(f"literal baseline:  "
          f"{report.literal_baseline['recovery_rate']:.4f}")
    margin = (report.recovery_rate
              - report.literal_baseline["recovery_rate"])
    print(f"denoising margin:  {margin:+.4f}")


if __name__ == "__main__":
    main()
