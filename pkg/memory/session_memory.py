session_memory = {
    "residuals": [],
    "verdicts": []
}


def remember_residual(check, space, residual, passed, tolerance=None):
    session_memory["residuals"].append({
        "check": check,
        "space": space,
        "residual": float(residual),
        "passed": bool(passed),
        "tolerance": tolerance
    })


def remember_verdict(verdict):
    required_keys = ['space', 'spec', 'flags']
    normalized = {key: verdict.get(key, 'Unknown ' + key) for key in required_keys}
    session_memory["verdicts"].append(normalized)


def worst_residuals():
    """Largest residual seen per (check, space)."""
    worst = {}
    for entry in session_memory["residuals"]:
        key = (entry["check"], entry["space"])
        if key not in worst or entry["residual"] > worst[key]["residual"]:
            worst[key] = entry
    return worst


def clear_session():
    session_memory["residuals"].clear()
    session_memory["verdicts"].clear()


def show_session_summary():
    print("\n🧠 Session Summary")
    print("-" * 40)
    print(f"Residuals Recorded: {len(session_memory['residuals'])}")
    for i, entry in enumerate(worst_residuals().values(), 1):
        status = "✅" if entry["passed"] else "❌"
        print(f"{i}. {status} [{entry['space']}] {entry['check']}: {entry['residual']:.2e}")
    print(f"\nVerdicts:")
    for i, verdict in enumerate(session_memory["verdicts"], 1):
        flags = verdict.get("flags", {})
        raised = [name for name, value in flags.items() if value] if isinstance(flags, dict) else []
        print(f"{i}. {verdict['space']}: {', '.join(raised) or 'none'}")
