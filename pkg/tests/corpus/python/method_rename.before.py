class Greeter:
    def hello(self, name):
        return "hi " + name
