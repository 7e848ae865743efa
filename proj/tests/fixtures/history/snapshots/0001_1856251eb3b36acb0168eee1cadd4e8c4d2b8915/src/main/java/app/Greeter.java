package app;

public class Greeter {
    public String greet(String name) {
        if (name.isEmpty()) {
            return "Hello";
        }
        return "Hello " + name;
    }
}
