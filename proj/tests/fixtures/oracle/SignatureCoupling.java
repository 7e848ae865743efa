class SignatureCoupling {
    SignatureCoupling(TrainingService service) {
    }

    public Course enroll(Student student, Long id) {
        return null;
    }

    public void drop(Student student) {
    }
}
