def broken(x):
    return 1
