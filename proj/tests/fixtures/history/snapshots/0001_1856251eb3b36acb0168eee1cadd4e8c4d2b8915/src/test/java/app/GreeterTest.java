package app;

class GreeterTest {
    @Test
    void greets() {
        assertEquals("Hello", new Greeter().greet(""));
    }
}
