class UseSites {
    private CourseRepository courses;

    void refresh(long id) {
        var c = courses.findById(id);
        courses.save(courses.findById(id));
        this.courses.flush();
        var other = courses;
    }
}
