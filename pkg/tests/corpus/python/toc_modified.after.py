def foo():
    return 2
