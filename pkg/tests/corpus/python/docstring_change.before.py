def area(r):
    """Circle area."""
    return 3.14159 * r * r
