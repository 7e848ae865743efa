class LambdaNeutral {
    void run(java.util.List<String> items) {
        items.forEach(s -> {
            if (s.isEmpty()) {
                System.out.println(s);
            }
        });
        Runnable r = () -> System.out.println("x");
        r.run();
    }
}
