def second():
    return "second"


def third():
    return "third"


def first():
    return "first"
