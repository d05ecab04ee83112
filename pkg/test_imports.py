"""
Test script to verify all imports work correctly.
"""
import sys


def test_imports():
    """Test that all modules can be imported without errors."""
    print("Testing imports...")

    from core import GausstailConfig, SteinerCoeffs2D, SteinerCoeffs3D, ExpansionResult, MCEstimate
    print("OK Core models imported successfully")

    from core import BlockScheduler, TOOL_VERSION, EXIT_OK, EXIT_INPUT_ERROR, EXIT_CONFIG_ERROR
    print("OK Core constants imported successfully")

    from geometry.planar import validate_set, steiner_coefficients_2d
    from geometry.polytope import box_union, polytope_coefficients
    print("OK Geometry imported successfully")

    from expansion.terms import sfh_expansion_2d, expansion_3d
    from oracle.grid import oracle_fit
    from simulation.montecarlo import estimate_exceedance
    print("OK Expansion, oracle and simulation imported successfully")

    from cli import COMMANDS
    assert sorted(COMMANDS) == ["coeffs", "examples", "expand", "simulate"]
    print(f"OK CLI commands: {', '.join(sorted(COMMANDS))}")

    # Test basic functionality
    config = GausstailConfig()
    print(f"OK Default configuration: {config.simulation.waves} waves")

    result = sfh_expansion_2d(SteinerCoeffs2D(sigma2=1.0, L1=4.0, L0=1.0), 3.0)
    assert result.total > 0
    print(f"OK Expansion of the unit square at u=3: {result.total:.6g}")

    print("\nAll imports successful!")


if __name__ == "__main__":
    try:
        test_imports()
    except Exception as e:
        print(f"ERROR Import error: {e}")
        sys.exit(1)
    sys.exit(0)
