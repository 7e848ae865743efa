import java.time.LocalDate;
import java.util.Map;
import java.util.Optional;

class ExternalDecls {
    private Optional<String> label;
    private Map<String, Student> index;

    LocalDate today() {
        LocalDate d = LocalDate.now();
        var e = LocalDate.now();
        Optional<Student> s = Optional.empty();
        return d;
    }
}
