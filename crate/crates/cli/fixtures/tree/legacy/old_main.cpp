int old_main(void) {
  old_setup();
  old_update_geometry();
  return 0;
}
