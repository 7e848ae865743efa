class Conjoined {
    boolean between(int a, int b, int c, int d) {
        if (a > b && c < d) {
            return true;
        }
        return false;
    }
}
